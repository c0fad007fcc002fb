import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheremaps.algebra import random_unitary
from spheremaps.automorphisms import BallAutomorphism, DiskAutomorphism, precompose
from spheremaps.constructions import blaschke_factor, random_rational_sphere_map, random_sphere_map
from spheremaps.errors import UnsupportedError, ValidationError
from spheremaps.homotopy import (
    HomotopyPath,
    HomotopySegment,
    constant_path,
    mobius_identity_path,
    multiply_path,
    pad_swap_path,
    polynomial_to_identity_path,
    rational_to_identity_path,
    verify_path,
)
from spheremaps.maps import (
    PolynomialSphereMap,
    RationalSphereMap,
    circle_points,
    evaluate,
    identity_map,
    monomial,
    pointwise_distance,
)
from spheremaps.normalform import GParams, JParams, make_G, make_J
from strategies import seeds

Z = monomial(1)
Z2 = monomial(2)


def residuals(F, K=64):
    vals = evaluate(F, circle_points(K))
    return np.sum(np.abs(vals) ** 2, axis=-1) - 1.0


# -- automorphisms -----------------------------------------------------------


def random_ball_point(rng, n, radius):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return radius * v / np.linalg.norm(v)


def test_ball_automorphism_basic_identities():
    rng = np.random.default_rng(0)
    a = random_ball_point(rng, 3, 0.6)
    phi = BallAutomorphism(a)
    assert np.allclose(phi(a), 0, atol=1e-15)
    assert np.allclose(phi(np.zeros(3)), a)
    w = np.stack([random_ball_point(rng, 3, r) for r in rng.uniform(0, 0.99, 50)])
    assert np.allclose(phi(phi(w)), w, atol=1e-12)
    assert np.all(np.linalg.norm(phi(w), axis=-1) < 1)
    sphere = np.stack([random_ball_point(rng, 3, 1.0) for _ in range(50)])
    assert np.allclose(np.linalg.norm(phi(sphere), axis=-1), 1, atol=1e-12)


def test_phi_zero_is_minus_identity():
    w = np.array([0.3, 0.2j])
    assert np.allclose(BallAutomorphism(np.zeros(2))(w), -w)


def test_ball_automorphism_rejects_outside_center():
    with pytest.raises(ValidationError):
        BallAutomorphism(np.array([1.0, 0.0]))


def test_compose_matches_pointwise():
    F = random_rational_sphere_map(2, 3, 1)
    rng = np.random.default_rng(1)
    U = random_unitary(3, rng)
    phi = BallAutomorphism(random_ball_point(rng, 3, 0.5), pre_unitary=U, post_unitary=U.conj().T)
    z = 0.9 * circle_points(16)
    assert np.allclose(evaluate(phi.compose(F), z), phi(evaluate(F, z)), atol=1e-12)


def test_precompose_disk_automorphism():
    F = random_rational_sphere_map(2, 2, 3)
    chi = DiskAutomorphism(0.3 - 0.2j, 0.7)
    z = 0.8 * circle_points(16)
    assert np.allclose(evaluate(precompose(F, chi), z), evaluate(F, chi(z)), atol=1e-12)


# -- elementary homotopies ---------------------------------------------------


def test_mobius_identity_path_examples():
    z = circle_points(32)
    for t in (0.0, 0.4, 1.0):
        assert mobius_identity_path(0, 0, t).is_identity
    assert np.allclose(mobius_identity_path(0.5, 0.0, 1.0)(z), z)
    chi = mobius_identity_path(0.5, math.pi / 3, 0.5)
    assert np.max(np.abs(np.abs(chi(z)) - 1)) < 1e-12
    assert chi.a == 0.25 and chi.theta == pytest.approx(math.pi / 6)
    with pytest.raises(ValidationError):
        mobius_identity_path(1.0, 0, 0.5)


def test_pad_swap_endpoints_and_samples():
    for t in (0.0, 0.5, 1.0):
        assert np.max(np.abs(residuals(pad_swap_path(Z2, t)))) < 1e-15
    assert np.array_equal(pad_swap_path(Z2, 0.0).coeffs, [[0, 0], [0, 0], [1, 0]])
    assert np.array_equal(pad_swap_path(Z2, 1.0).coeffs, [[0, 0], [0, 1]])


def test_pad_swap_j_family_grid():
    J = make_J(JParams(math.pi / 4, math.pi / 4))
    worst = max(np.max(np.abs(residuals(pad_swap_path(J, t)))) for t in np.linspace(0, 1, 11))
    assert worst < 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=seeds, t=st.floats(0, 1))
def test_pad_swap_residual_transfer(seed, t):
    f = random_sphere_map(3, 3, seed)
    f = type(f)(f.coeffs * 1.01)  # deliberately not a sphere map
    lhs = residuals(pad_swap_path(f, t))
    assert np.allclose(lhs, (1 - t * t) * residuals(f), atol=1e-12)


def test_pad_swap_rational():
    G = make_G(GParams(0.4, 0.6), 2)
    assert verify_path(pad_swap_path(G), tol=1e-12).passed


def test_multiply_constant_path():
    f = random_sphere_map(2, 2, 0)
    path = multiply_path(constant_path(f), "whole", Z)
    assert pointwise_distance(path.at(0.5), PolynomialSphereMap(np.vstack([np.zeros((1, 2)), f.coeffs]))) < 1e-15


def test_multiply_pad_swap_connects_squares():
    path = multiply_path(pad_swap_path(Z), "whole", Z)
    assert np.array_equal(path.start.coeffs, [[0, 0], [0, 0], [1, 0]])
    assert np.array_equal(path.end.coeffs, [[0, 0], [0, 0], [0, 1]])
    assert verify_path(path, tol=1e-12).passed


def test_multiply_preserves_residuals_with_blaschke():
    f = random_sphere_map(2, 2, 5)
    f = type(f)(f.coeffs * 0.99)
    path = multiply_path(constant_path(f), "whole", blaschke_factor(0.3 + 0.4j))
    assert np.allclose(residuals(path.at(0.3)), residuals(f), atol=1e-12)


def test_multiply_last_component():
    f = random_sphere_map(3, 3, 2)
    base = polynomial_to_identity_path(f)
    path = multiply_path(base, "last_component", Z)
    rep = verify_path(path)
    assert rep.passed and rep.max_degree <= 4
    assert all(isinstance(path.at(t), PolynomialSphereMap) for t in np.linspace(0, 1, 7))


def test_multiply_path_validation():
    path = constant_path(identity_map(2))
    with pytest.raises(ValidationError):
        multiply_path(path, "whole", PolynomialSphereMap(np.array([[0.5], [0.5]])))
    with pytest.raises(ValidationError):
        multiply_path(path, "last_component", blaschke_factor(0.2))
    with pytest.raises(ValidationError):
        multiply_path(pad_swap_path(make_G(GParams(0.3, 0.3), 1).padded(1)), "last_component", Z)
    with pytest.raises(ValidationError):
        multiply_path(path, "sideways", Z)


# -- paths to the identity ---------------------------------------------------


def test_rational_path_from_identity_is_trivial():
    path = rational_to_identity_path(identity_map(2), 2)
    assert len(path.segments) == 1
    assert pointwise_distance(path.at(0.0), identity_map(2)) == 0
    assert pointwise_distance(path.at(1.0), identity_map(2)) == 0


def test_rational_path_from_g_family():
    G = make_G(GParams(math.pi / 3, 0.5), 2)
    rep = verify_path(rational_to_identity_path(G, 2), 21, 64, 1e-8)
    assert rep.passed, rep.failure


def test_rational_path_from_j_family():
    J = make_J(JParams(math.pi / 4, math.pi / 4))
    path = rational_to_identity_path(J, 2)
    rep = verify_path(path, 21, 64, 1e-8)
    assert rep.passed and rep.endpoint_error < 1e-9
    assert path.depth == 2


def test_rational_path_depth_equals_degree():
    for seed in range(8):
        d = 1 + seed % 4
        F = random_rational_sphere_map(d, 2 + seed % 3, seed)
        path = rational_to_identity_path(F)
        assert path.depth == d
        assert verify_path(path).passed


def test_rational_path_in_larger_dimension():
    path = rational_to_identity_path(make_G(GParams(0.3, 0.2), 2), 4)
    assert path.target_dim == 4
    assert verify_path(path).passed


def test_rational_path_errors():
    with pytest.raises(UnsupportedError):
        rational_to_identity_path(Z, 1)
    pole = RationalSphereMap(np.array([[-2.0], [1.0]]), [1.0, -2.0])  # Blaschke factor with its zero outside
    with pytest.raises(ValidationError):
        rational_to_identity_path(pole.padded(2), 2)
    with pytest.raises(ValidationError):
        rational_to_identity_path(PolynomialSphereMap(np.array([[0.5, 0.5]])), 2)


def test_polynomial_path_from_identity_is_unitary():
    path = polynomial_to_identity_path(identity_map(2))
    assert all(seg.kind == "UnitaryPath" for seg in path.segments)
    assert verify_path(path).passed


def test_polynomial_path_pythagorean_pair():
    f = PolynomialSphereMap.from_components([[0, 0, math.cos(math.pi / 6)], [0, math.sin(math.pi / 6)]])
    path = polynomial_to_identity_path(f)
    rep = verify_path(path)
    assert rep.passed and rep.max_degree <= 2
    z = circle_points(8)
    for t in np.linspace(0, 1, 21):
        H = path.at(t)
        assert isinstance(H, PolynomialSphereMap) and H.target_dim == 2
        direct = path(t, z)
        assert np.max(np.abs(direct - z[:, None] ** np.arange(H.degree + 1) @ H.coeffs)) < 1e-10


def test_polynomial_path_random_degree_five():
    f = random_sphere_map(5, 3, 0)
    rep = verify_path(polynomial_to_identity_path(f))
    assert rep.passed and rep.max_degree <= 5


def test_polynomial_path_constant_map():
    f = PolynomialSphereMap(np.array([[0.6, 0.8j]]))
    path = polynomial_to_identity_path(f)
    rep = verify_path(path)
    assert rep.passed and rep.max_degree <= 1


def test_polynomial_path_rejects_n1():
    with pytest.raises(UnsupportedError):
        polynomial_to_identity_path(Z2)


def test_reversed_and_concatenated_paths():
    f = random_sphere_map(3, 3, 1)
    g = random_sphere_map(2, 3, 2)
    path = polynomial_to_identity_path(f) + polynomial_to_identity_path(g).reversed()
    rep = verify_path(path, K_t=41)
    assert rep.passed
    assert pointwise_distance(path.at(1.0), g) < 1e-12


# -- path verification -------------------------------------------------------


def test_verify_constant_path():
    rep = verify_path(constant_path(Z))
    assert rep.passed and rep.continuity_modulus == 0
    assert len(rep.rows) == 21 * 64


def test_verify_pad_swap_tight():
    assert verify_path(pad_swap_path(Z2), 21, 64, 1e-10).passed


def test_verify_detects_broken_junction():
    f = identity_map(2)
    g = PolynomialSphereMap(np.array([[0, 0], [math.sqrt(1 - 0.01), 0.1]]))
    path = HomotopyPath(
        [
            HomotopySegment("Reparametrized", lambda s: f),
            HomotopySegment("Reparametrized", lambda s: g),
        ],
        2,
        f,
        g,
    )
    rep = verify_path(path)
    assert not rep.passed
    assert rep.worst_junction == 0
    assert rep.junction_errors[0] == pytest.approx(math.hypot(1 - math.sqrt(0.99), 0.1))
    assert "segments 0 and 1" in rep.failure
