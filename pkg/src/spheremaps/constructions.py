"""Generators of sphere maps and the non-algebraic two-component example."""

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P

from .algebra import orthonormal_completion, random_unitary
from .errors import InfeasibleError, ValidationError
from .maps import PolynomialSphereMap, RationalSphereMap, apply_unitary


def _check_orthonormal(V, N):
    V = np.asarray(V, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] != N:
        raise ValidationError(f"subspace vectors have length {V.shape[0]}, map has {N} components")
    if V.shape[1] > N:
        raise ValidationError("more subspace vectors than the target dimension")
    dev = np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1]))) if V.size else 0.0
    if dev > 1e-9:
        raise ValidationError(f"subspace basis is not orthonormal (deviation {dev:.2e})")
    return V


def _split(coeffs, V):
    """Coordinates of ``coeffs`` rows in ``V-perp`` and in ``V``."""
    N, k = V.shape
    W = orthonormal_completion(V, N)[:, k:]
    return coeffs @ W.conj(), coeffs @ V.conj()


def tensor_step(f, V):
    """``(P_{V-perp} f) (+) z (P_V f)`` written in ``N`` coordinates.

    ``V`` is an ``(N, k)`` array with orthonormal columns (or a list of
    vectors). The first ``N-k`` coordinates are those of the complement,
    the last ``k`` those of ``V``. The result is a sphere map whenever
    ``f`` is, since ``|z| = 1`` on the circle.
    """
    V = _check_orthonormal(np.array(V, dtype=complex).T if isinstance(V, list) else V, f.target_dim)
    perp, par = _split(f.coeffs, V)
    out = np.zeros((f.degree + 2, f.target_dim), dtype=complex)
    out[:-1, : perp.shape[1]] = perp
    out[1:, perp.shape[1]:] = par
    return PolynomialSphereMap(out)


def blaschke_factor(a):
    """``(z - a) / (1 - conj(a) z)`` as a scalar rational map."""
    if abs(a) >= 1:
        raise ValidationError(f"Blaschke factor needs |a| < 1, got {a}")
    return RationalSphereMap(np.array([[-a], [1.0]]), [1.0, -np.conj(a)])


def rational_tensor_step(F, V, a):
    """Tensor step with the Blaschke factor at ``a`` in place of ``z``."""
    F = F.as_rational()
    V = _check_orthonormal(V, F.target_dim)
    if abs(a) >= 1:
        raise ValidationError(f"Blaschke factor needs |a| < 1, got {a}")
    perp, par = _split(F.numerator, V)
    den_b = np.array([1.0, -np.conj(a)])
    num_b = np.array([-a, 1.0])
    cols = [P.polymul(perp[:, i], den_b) for i in range(perp.shape[1])]
    cols += [P.polymul(par[:, i], num_b) for i in range(par.shape[1])]
    width = max(len(c) for c in cols)
    num = np.zeros((width, F.target_dim), dtype=complex)
    for i, c in enumerate(cols):
        num[: len(c), i] = c
    return RationalSphereMap(num, P.polymul(F.denominator, den_b))


def _random_unit_vector(N, rng):
    v = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    return v / np.linalg.norm(v)


def _random_subspace(N, rng):
    # k = N would only multiply the whole map by z
    k = int(rng.integers(1, max(N - 1, 1) + 1))
    return random_unitary(N, rng)[:, :k]


def random_sphere_map(d, N, seed):
    """Seeded random polynomial sphere map of exact degree ``d`` into ``C^N``.

    Starts from a random unit constant and applies ``d`` tensor steps
    with random subspaces, each followed by a random target unitary. Not
    every unitary class is claimed to be reachable this way.
    """
    if d < 0 or N < 1:
        raise InfeasibleError(f"no sphere map of degree {d} into C^{N}")
    rng = np.random.default_rng(seed)
    f = PolynomialSphereMap(_random_unit_vector(N, rng)[None, :])
    for _ in range(d):
        for _attempt in range(100):
            V = _random_subspace(N, rng)
            lead = f.coeffs[-1]
            if np.linalg.norm(V.conj().T @ lead) > 1e-3 * np.linalg.norm(lead):
                break
        else:
            raise InfeasibleError("could not raise the degree with a well-conditioned step")
        f = apply_unitary(random_unitary(N, rng), tensor_step(f, V))
    return f


def random_rational_sphere_map(d, N, seed, max_center=0.7):
    """Seeded random rational proper map of degree ``d`` into ``C^N``.

    Like :func:`random_sphere_map` but every step multiplies by a Blaschke
    factor with a random center of modulus below ``max_center``, so the
    denominator has all its zeros outside the closed disk.
    """
    if d < 1 or N < 1:
        raise InfeasibleError(f"no rational proper map of degree {d} into C^{N}")
    rng = np.random.default_rng(seed)
    F = RationalSphereMap(_random_unit_vector(N, rng)[None, :], [1.0])
    for _ in range(d):
        r = max_center * math.sqrt(rng.uniform())
        a = r * np.exp(2j * np.pi * rng.uniform())
        for _attempt in range(100):
            V = _random_subspace(N, rng)
            lead = F.numerator[-1]
            if np.linalg.norm(V.conj().T @ lead) > 1e-3 * np.linalg.norm(lead):
                break
        F = apply_unitary(random_unitary(N, rng), rational_tensor_step(F, V, a))
    return F


@dataclass(frozen=True)
class FourierPair:
    """Truncated two-component map ``(exp(z - 2), exp(h))``.

    ``h = u + iv`` where ``u`` is the harmonic extension of
    ``phi(theta) = log(1 - exp(2 (cos theta - 2))) / 2`` and ``v(0) = 0``.
    """

    M: int
    f1_description: str
    h_coeffs: np.ndarray
    f2_coeffs: np.ndarray
    sup_residual: float
    log10_residual: float
    max_abs_f1: float
    samples: int
    dps: int

    @property
    def taylor_head(self):
        return self.f2_coeffs[:20]

    def as_map(self, degree=30):
        """Polynomial truncation of both components (double precision)."""
        f1 = np.array([math.exp(-2) / math.factorial(j) for j in range(degree + 1)])
        f2 = np.zeros(degree + 1, dtype=complex)
        n = min(degree + 1, self.f2_coeffs.size)
        f2[:n] = self.f2_coeffs[:n]
        return PolynomialSphereMap(np.stack([f1, f2], axis=1))


def nonalgebraic_pair(M, dps=None):
    """Build the truncated non-algebraic example of order ``M``.

    Fourier coefficients, the series exponential and the residual are all
    computed in ``mpmath`` at ``dps`` decimal digits. The Fourier
    coefficients of ``phi`` decay roughly like ``10**(-1.4 k)``, so the
    default precision ``1.6 M + 30`` keeps rounding below the truncation
    error and the residual genuinely reflects the order ``M``.
    """
    if M < 8:
        raise ValidationError(f"truncation order must be at least 8, got {M}")
    dps = dps or int(1.6 * M) + 30
    L = 8 * M
    with mpmath.workdps(dps):
        # angle table: index m <-> pi m / L, covering both the grid 2 pi j / L and its midpoints
        cos_t = [mpmath.cos(mpmath.pi * m / L) for m in range(2 * L)]
        sin_t = [mpmath.sin(mpmath.pi * m / L) for m in range(2 * L)]
        phi = [mpmath.log(1 - mpmath.exp(2 * (cos_t[2 * j] - 2))) / 2 for j in range(L)]
        # phi is even in theta, so its Fourier coefficients are real cosine sums
        c = [mpmath.fsum(phi[j] * cos_t[(2 * k * j) % (2 * L)] for j in range(L)) / L for k in range(M + 1)]
        h = [c[0]] + [2 * ck for ck in c[1:]]
        g = [mpmath.exp(h[0])]
        for n in range(1, M + 1):
            g.append(mpmath.fsum(k * h[k] * g[n - k] for k in range(1, n + 1)) / n)
        worst = mpmath.mpf(0)
        max_f1 = mpmath.mpf(0)
        for j in range(L):
            m = 2 * j + 1  # theta = 2 pi (j + 1/2) / L, off the coefficient grid
            re = mpmath.fsum(g[k] * cos_t[(k * m) % (2 * L)] for k in range(M + 1))
            im = mpmath.fsum(g[k] * sin_t[(k * m) % (2 * L)] for k in range(M + 1))
            f1_sq = mpmath.exp(2 * (cos_t[m] - 2))
            worst = max(worst, abs(f1_sq + re * re + im * im - 1))
            max_f1 = max(max_f1, mpmath.sqrt(f1_sq))
        log10 = float(mpmath.log10(worst)) if worst > 0 else -math.inf
        return FourierPair(
            M=M,
            f1_description="exp(z - 2)",
            h_coeffs=np.array([float(x) for x in h], dtype=complex),
            f2_coeffs=np.array([float(x) for x in g], dtype=complex),
            sup_residual=float(worst),
            log10_residual=log10,
            max_abs_f1=float(max_f1),
            samples=L,
            dps=dps,
        )
