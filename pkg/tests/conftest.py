from __future__ import annotations

import pytest

from tiltsheaf.branch import BranchSheaf
from tiltsheaf.curve_model import CurveDescriptor, PointDescriptor, weighted_line
from tiltsheaf.tube import TubeCoord


def example_curve() -> CurveDescriptor:
    """One point x of weight 11, unit invariants."""
    return CurveDescriptor((PointDescriptor("x", 11),))


def example_branch() -> BranchSheaf:
    T = lambda a, n: TubeCoord("x", a, n, 11)  # noqa: E731
    return BranchSheaf.from_summands([T(0, 4), T(-2, 2), T(-2, 1), T(0, 1),
                                      T(5, 3), T(5, 2), T(4, 1)])


def elliptic_curve(labels=("y1", "y2")) -> CurveDescriptor:
    return CurveDescriptor(tuple(PointDescriptor(y) for y in labels),
                           chi_centre=0, genus_nw=1)


@pytest.fixture
def example():
    return example_curve(), example_branch()


@pytest.fixture
def tubular_236():
    return weighted_line([2, 3, 6], homogeneous=["y"])


ACCEPTANCE: dict[int, str] = {}


def record_criterion(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
