from fractions import Fraction

import pytest
from hypothesis import given, settings

from chatterlab import chatter as ch
from chatterlab.polyfields import lie_bracket, parse_field
from chatterlab.systems import builtin_system
from strategies import fields


@pytest.fixture(scope="module")
def demo9():
    return builtin_system("demo9")


def _cert(system, point):
    gens = list(system.vertices)
    bundle = ch.compute_bundle(gens[0], gens[1], point)
    return gens, bundle, ch.find_fuller_covector(gens, (0, 1), bundle, point)


def test_demo9_certificate(demo9):
    gens, bundle, cert = _cert(demo9, (0,) * 9)
    assert cert.exact
    assert cert.beta_pairing == -1
    assert cert.separation_margin > 0
    assert cert.orthogonality_residual == 0
    rep = ch.reverify_certificate(cert, gens)
    assert rep["all"], rep
    assert ch.check_independence(bundle)


def test_certificate_scaling(demo9):
    gens, _, cert = _cert(demo9, (0,) * 9)
    big = cert.scaled(3.0)
    assert big.beta_pairing == pytest.approx(-3.0)
    assert ch.reverify_certificate(big, gens)["all"]
    with pytest.raises(ValueError):
        cert.scaled(-1.0)


def test_demo9_at_float_point(demo9):
    gens, _, cert = _cert(demo9, (0.0,) * 9)
    assert not cert.exact
    assert ch.reverify_certificate(cert, gens)["all"]


def test_r4_dimension_too_small():
    r4 = builtin_system("r4")
    gens = list(r4.vertices)
    bundle = ch.compute_bundle(gens[0], gens[1], (0, 0, 0, 0))
    with pytest.raises(ch.DimensionTooSmall):
        ch.find_fuller_covector(gens, (0, 1), bundle)


def test_non_exposed_edge(demo9):
    gens = list(demo9.vertices)
    # f1 and -f1 are opposite vertices
    assert not ch.is_exposed_edge(gens, (0, 2), (0,) * 9)
    bundle = ch.compute_bundle(gens[0], gens[2], (0,) * 9)
    with pytest.raises(ch.NotFound) as info:
        ch.find_fuller_covector(gens, (0, 2), bundle)
    assert info.value.condition == "exposed_edge"


def test_independence_failure():
    # a 7-dimensional linear system: brackets all vanish
    v = tuple(f"x{i}" for i in range(1, 8))
    e = lambda i: parse_field(", ".join("1" if k == i else "0" for k in range(7)), v)
    gens = [e(0), e(1), -e(0), -e(1)]
    bundle = ch.compute_bundle(gens[0], gens[1], (0,) * 7)
    with pytest.raises(ch.NotFound) as info:
        ch.find_fuller_covector(gens, (0, 1), bundle)
    assert info.value.condition == "independence"


def test_edge_spec():
    assert ch.EdgeSpec.of((2, 3)).vertex_index_b == 3
    with pytest.raises(ValueError):
        ch.EdgeSpec(1, 1)


def test_edge_needs_three_generators(demo9):
    with pytest.raises(ValueError):
        ch.is_exposed_edge(list(demo9.vertices)[:2], (0, 1), (0,) * 9)


@settings(max_examples=20)
@given(fields(3, max_deg=2), fields(3, max_deg=2))
def test_poisson_lie_correspondence(h1, h2):
    assert ch.check_poisson_identity(h1, h2)


def test_poisson_sign_convention():
    v = ("x", "y")
    a, b = parse_field("1, 0", v), parse_field("0, x", v)
    n = 2
    lhs = ch.poisson_bracket(ch.hamiltonian(a), ch.hamiltonian(b), n)
    assert lhs == ch.hamiltonian(lie_bracket(a, b))
    assert lhs != ch.hamiltonian(lie_bracket(b, a))


def test_bundle_names(demo9):
    gens = list(demo9.vertices)
    bundle = ch.compute_bundle(gens[0], gens[1], (Fraction(0),) * 9)
    assert bundle.dimension == 9
    assert set(ch.HIGHER_NAMES) <= set(bundle.values)
    assert all(v == 0 for v in bundle.alpha)
