"""Hypothesis strategies shared by the tests."""
from fractions import Fraction

from hypothesis import strategies as st

from chatterlab.polyfields import Poly, PolyVectorField

small_frac = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5))


@st.composite
def polys(draw, nvars, max_terms=4, max_deg=2):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = tuple(draw(st.lists(st.integers(0, max_deg), min_size=nvars, max_size=nvars)))
        terms[exps] = draw(small_frac)
    return Poly(nvars, terms)


@st.composite
def fields(draw, nvars, max_terms=3, max_deg=2):
    return PolyVectorField([draw(polys(nvars, max_terms, max_deg)) for _ in range(nvars)])


def rational_points(n, lo=-4, hi=4):
    return st.lists(small_frac.filter(lambda q: lo <= q <= hi), min_size=n, max_size=n).map(tuple)
