import math

import numpy as np
import pytest

from spheremaps.algebra import random_unitary
from spheremaps.constructions import (
    blaschke_factor,
    nonalgebraic_pair,
    random_rational_sphere_map,
    random_sphere_map,
    rational_tensor_step,
    tensor_step,
)
from spheremaps.errors import InfeasibleError, ValidationError
from spheremaps.maps import (
    PolynomialSphereMap,
    circle_sample_residual,
    has_pole_in_closed_disk,
    reduce_lowest_terms,
    verify,
    verify_polynomial,
)
from spheremaps.moduli import constraint_residual, gram

S2 = 1 / math.sqrt(2)


def test_tensor_step_constant_to_z():
    f = tensor_step(PolynomialSphereMap(np.array([[1.0]])), [np.array([1.0])])
    assert np.array_equal(f.coeffs, [[0], [1]])


def test_tensor_step_z_to_z_squared():
    f = tensor_step(PolynomialSphereMap(np.array([[0.0], [1.0]])), [np.array([1.0])])
    assert np.array_equal(f.coeffs, [[0], [0], [1]])


def test_tensor_step_on_first_coordinate():
    f = PolynomialSphereMap.from_components([[0, S2], [S2]])
    g = tensor_step(f, [np.array([1.0, 0.0])])
    assert g.degree == 2
    assert verify_polynomial(g).is_sphere_map
    assert np.allclose(g.coeffs, [[S2, 0], [0, 0], [0, S2]])


def test_tensor_step_rejects_non_orthonormal():
    f = PolynomialSphereMap.from_components([[0, S2], [S2]])
    with pytest.raises(ValidationError):
        tensor_step(f, [np.array([1.0, 1.0])])
    with pytest.raises(ValidationError):
        tensor_step(f, [np.array([1.0, 0.0, 0.0])])


def test_tensor_step_preserves_sphere_maps():
    rng = np.random.default_rng(0)
    for k in range(200):
        N = 1 + k % 5
        f = random_sphere_map(k % 5, N, k)
        V = random_unitary(N, rng)[:, : 1 + k % N]
        g = tensor_step(f, V)
        assert g.degree <= f.degree + 1
        assert verify_polynomial(g).max_residual < 1e-10


def test_rational_tensor_step():
    F = rational_tensor_step(PolynomialSphereMap(np.array([[0.6, 0.8]])), np.array([[1.0], [0.0]]), 0.5j)
    assert verify(F).is_sphere_map
    assert not has_pole_in_closed_disk(F)
    with pytest.raises(ValidationError):
        blaschke_factor(1.0)


def test_random_sphere_map_examples():
    c = random_sphere_map(0, 3, 1)
    assert c.degree == 0 and np.linalg.norm(c.coeffs[0]) == pytest.approx(1)
    f = random_sphere_map(3, 4, 7)
    assert f.degree == 3 and verify_polynomial(f).is_sphere_map
    g = random_sphere_map(3, 4, 7)
    assert np.array_equal(f.coeffs, g.coeffs)
    with pytest.raises(InfeasibleError):
        random_sphere_map(-1, 2, 0)


def test_random_sphere_map_grams_satisfy_constraints():
    for d in range(9):
        for seed in range(5):
            B = gram(random_sphere_map(d, d + 1, seed))
            assert np.max(np.abs(constraint_residual(B))) < 1e-10


def test_random_rational_maps_are_proper():
    for seed in range(20):
        d = 1 + seed % 4
        F = random_rational_sphere_map(d, 3, seed)
        assert F.degree == d
        assert verify(F).is_sphere_map
        assert not has_pole_in_closed_disk(F)
        assert reduce_lowest_terms(F).degree == d


def test_nonalgebraic_pair_rejects_small_order():
    with pytest.raises(ValidationError):
        nonalgebraic_pair(7)


def test_nonalgebraic_pair_convergence():
    pairs = [nonalgebraic_pair(M) for M in (16, 32, 64, 128)]
    res = [p.sup_residual for p in pairs]
    assert res[2] < 1e-6
    for a, b in zip(res[:-1], res[1:]):
        assert b < 2 * a
    assert res[3] < res[2]
    assert all(p.samples >= 8 * p.M for p in pairs)


def test_nonalgebraic_first_component_bound():
    p = nonalgebraic_pair(32)
    assert p.max_abs_f1 <= math.exp(-1) + 1e-15
    # samples sit half a grid step away from theta = 0, where the maximum is attained
    assert p.max_abs_f1 == pytest.approx(math.exp(-1), rel=1e-3)


def test_nonalgebraic_taylor_head():
    p = nonalgebraic_pair(64)
    head = p.taylor_head
    assert head.size == 20 and np.all(np.abs(head) > 0)
    # the truncated pair is a sphere map to double precision
    assert circle_sample_residual(p.as_map(40), 256) < 1e-14
