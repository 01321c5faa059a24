from __future__ import annotations

from tiltsheaf.curve_model import weighted_line
from tiltsheaf.symbolic import EPS_POLY, ONE, Poly, e_of, f_of, poly_sum


def test_renderings():
    assert ((ONE + EPS_POLY) * e_of("x")).render(False) == "(1+ε)e"
    assert (EPS_POLY * e_of("x") * f_of("x")).render(False) == "εd"
    assert (ONE + EPS_POLY).render() == "1+ε"
    assert (EPS_POLY * f_of("x")).render() == "εf_x"
    assert (ONE * 2).render() == "2"
    assert Poly().render() == "0"


def test_evaluation():
    d = weighted_line([3], epsilon=2, f=3, e=1)
    assert ((ONE + EPS_POLY) * e_of("x1")).evaluate(d) == 3
    assert (EPS_POLY * e_of("x1") * f_of("x1")).evaluate(d) == 6
    assert poly_sum([ONE, ONE, EPS_POLY]).evaluate(d) == 4


def test_like_terms_merge():
    assert EPS_POLY + EPS_POLY == EPS_POLY * 2
    assert (EPS_POLY * 2).render() == "2ε"
