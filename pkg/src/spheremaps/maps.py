"""Sphere-map data types and their verification.

A polynomial map ``f(z) = sum_j A_j z^j`` is stored as a ``(d+1, N)`` array
whose row ``j`` is the coefficient vector ``A_j``. A rational map stores a
vector numerator the same way plus a scalar denominator ``q_0..q_m``.
Coefficient arrays are always in ascending powers of ``z``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .algebra import as_matrix
from .errors import (
    DimensionError,
    InconsistencyError,
    PoleError,
    PreconditionError,
    ValidationError,
)

TOL = 1e-9
ROOT_TOL = 1e-7
CIRCLE_TOL = 1e-7


class AmbiguousCancellationWarning(UserWarning):
    """Clustered denominator roots prevented a safe cancellation."""


def _trim_rows(arr):
    """Drop trailing coefficient rows that are exactly zero (keep one)."""
    nz = np.flatnonzero(np.any(arr.reshape(arr.shape[0], -1) != 0, axis=1))
    last = nz[-1] if nz.size else 0
    return arr[: last + 1]


def _frozen(arr):
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


def trim_small(coeffs, rtol):
    """Drop trailing coefficients (rows) whose size is below ``rtol * scale``."""
    arr = np.asarray(coeffs)
    flat = np.abs(arr.reshape(arr.shape[0], -1)).max(axis=1)
    scale = flat.max() if flat.size else 0.0
    if scale == 0:
        return arr[:1]
    keep = np.flatnonzero(flat > rtol * scale)
    return arr[: keep[-1] + 1]


def circle_points(K):
    return np.exp(2j * np.pi * np.arange(K) / K)


@dataclass(frozen=True, eq=False)
class PolynomialSphereMap:
    """Polynomial map ``z -> sum_j A_j z^j`` into ``C^N``."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = as_matrix(self.coeffs, "coeffs")
        arr = _trim_rows(arr)
        if not np.any(arr):
            raise ValidationError("the zero map is not a sphere map")
        object.__setattr__(self, "coeffs", _frozen(arr))

    @classmethod
    def from_components(cls, components):
        """Build from per-component coefficient lists ``components[i][j]``."""
        width = max(len(c) for c in components)
        arr = np.zeros((width, len(components)), dtype=complex)
        for i, comp in enumerate(components):
            arr[: len(comp), i] = comp
        return cls(arr)

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    @property
    def target_dim(self):
        return self.coeffs.shape[1]

    @property
    def matrix(self):
        """``N x (d+1)`` matrix whose column ``j`` is ``A_j``."""
        return self.coeffs.T

    @property
    def numerator(self):
        return self.coeffs

    @property
    def denominator(self):
        return np.ones(1, dtype=complex)

    def __call__(self, z):
        return evaluate(self, z)

    def as_rational(self):
        return RationalSphereMap(self.coeffs, [1.0])

    def padded(self, N):
        return PolynomialSphereMap(_pad_columns(self.coeffs, N))

    def __repr__(self):
        return f"PolynomialSphereMap(degree={self.degree}, N={self.target_dim})"


@dataclass(frozen=True, eq=False)
class RationalSphereMap:
    """Rational map ``z -> p(z) / q(z)`` with vector ``p`` and scalar ``q``."""

    numerator: np.ndarray
    denominator: np.ndarray

    def __post_init__(self):
        num = as_matrix(self.numerator, "numerator")
        den = np.array(self.denominator, dtype=complex).reshape(-1)
        if den.size == 0 or not np.all(np.isfinite(den)):
            raise ValidationError("denominator must be a nonempty finite coefficient list")
        if not np.any(den):
            raise ValidationError("denominator is identically zero")
        num = _trim_rows(num)
        den = _trim_rows(den)
        if not np.any(num):
            raise ValidationError("numerator is identically zero")
        object.__setattr__(self, "numerator", _frozen(num))
        object.__setattr__(self, "denominator", _frozen(den))

    @property
    def degree(self):
        return max(self.numerator_degree, self.denominator_degree)

    @property
    def numerator_degree(self):
        return self.numerator.shape[0] - 1

    @property
    def denominator_degree(self):
        return self.denominator.shape[0] - 1

    @property
    def target_dim(self):
        return self.numerator.shape[1]

    @property
    def is_polynomial(self):
        return self.denominator_degree == 0

    def __call__(self, z):
        return evaluate(self, z)

    def as_rational(self):
        return self

    def as_polynomial(self):
        if not self.is_polynomial:
            raise ValidationError("map has a nonconstant denominator")
        return PolynomialSphereMap(self.numerator / self.denominator[0])

    def padded(self, N):
        return RationalSphereMap(_pad_columns(self.numerator, N), self.denominator)

    def __repr__(self):
        return (
            f"RationalSphereMap(deg p={self.numerator_degree}, "
            f"deg q={self.denominator_degree}, N={self.target_dim})"
        )


def _pad_columns(arr, N):
    if N < arr.shape[1]:
        raise DimensionError(f"cannot pad a map with {arr.shape[1]} components to {N}")
    out = np.zeros((arr.shape[0], N), dtype=complex)
    out[:, : arr.shape[1]] = arr
    return out


def as_rational(F):
    return F.as_rational()


def evaluate(F, z):
    """Value of ``F`` at ``z`` (scalar) or at each entry of an array of points.

    For array input the result has shape ``z.shape + (N,)``.

    Raises:
        PoleError: the denominator vanishes at one of the points.
    """
    z_arr = np.asarray(z, dtype=complex)
    num = P.polyval(z_arr, F.numerator)  # shape (N,) + z.shape
    num = np.moveaxis(num, 0, -1)
    if isinstance(F, PolynomialSphereMap):
        return num
    den = P.polyval(z_arr, F.denominator)
    scale = np.abs(F.denominator).sum() * np.maximum(1.0, np.abs(z_arr)) ** F.denominator_degree
    bad = np.abs(den) <= 1e-14 * scale
    if np.any(bad):
        root = complex(z_arr[bad].flat[0]) if z_arr.ndim else complex(z_arr)
        raise PoleError(f"denominator vanishes at z = {root}", root)
    return num / den[..., None]


def upper_traces(V):
    """Upper traces ``lambda_l = sum_j <V_j, V_{j+l}>`` for ``l = 0..d``."""
    V = as_matrix(V, "vectors")
    G = V @ V.conj().T  # G[j, k] = <V_j, V_k>
    return np.array([np.trace(G, offset=l) for l in range(V.shape[0])])


def scalar_autocorrelation(q, length):
    """``mu_l = sum_j q_j conj(q_{j+l})`` for ``l < length``, the scalar analogue of upper traces."""
    q = np.asarray(q, dtype=complex)
    out = np.zeros(length, dtype=complex)
    for l in range(min(length, q.size)):
        out[l] = np.sum(q[: q.size - l] * q[l:].conj())
    return out


@dataclass(frozen=True)
class VerificationReport:
    is_sphere_map: bool
    residuals: np.ndarray
    max_residual: float
    circle_residual: float
    tol: float


def _report(residuals, circle_residual, tol):
    max_res = float(np.max(np.abs(residuals))) if residuals.size else 0.0
    return VerificationReport(
        is_sphere_map=bool(max_res < tol),
        residuals=residuals,
        max_residual=max_res,
        circle_residual=circle_residual,
        tol=tol,
    )


def verify_polynomial(f, tol=TOL, samples=None):
    """Check the identity system ``lambda_0 = 1``, ``lambda_l = 0`` (``l >= 1``)."""
    lam = upper_traces(f.coeffs)
    residuals = lam.copy()
    residuals[0] -= 1.0
    K = samples or 4 * (f.degree + 1)
    return _report(residuals, circle_sample_residual(f, K), tol)


def verify_rational(F, tol=TOL, samples=None):
    """Check ``||p||^2 = |q|^2`` on the circle by matching Fourier coefficients."""
    if isinstance(F, PolynomialSphereMap):
        F = F.as_rational()
    D = F.degree
    num = np.zeros((D + 1, F.target_dim), dtype=complex)
    num[: F.numerator.shape[0]] = F.numerator
    residuals = upper_traces(num) - scalar_autocorrelation(F.denominator, D + 1)
    K = samples or 4 * (D + 1)
    try:
        circle = circle_sample_residual(F, K)
    except PoleError:
        circle = float("inf")
    return _report(residuals, circle, tol)


def verify(F, tol=TOL, samples=None):
    if isinstance(F, PolynomialSphereMap):
        return verify_polynomial(F, tol, samples)
    return verify_rational(F, tol, samples)


def circle_sample_residual(F, K=64, circle_tol=CIRCLE_TOL):
    """``max_k | ||F(e^{i theta_k})||^2 - 1 |`` over ``K`` equispaced angles.

    Raises:
        PoleError: the denominator has a root on the unit circle.
    """
    if isinstance(F, RationalSphereMap) and not F.is_polynomial:
        for root in poly_roots(F.denominator):
            if abs(abs(root) - 1.0) < circle_tol:
                raise PoleError(f"denominator has a root on the unit circle at {root}", root)
    values = evaluate(F, circle_points(K))
    return float(np.max(np.abs(np.sum(np.abs(values) ** 2, axis=-1) - 1.0)))


def poly_roots(coeffs):
    """Roots of a scalar polynomial, ordered by (modulus, argument).

    Uses companion-matrix eigenvalues (``numpy.polynomial``).
    """
    c = _trim_rows(np.asarray(coeffs, dtype=complex).reshape(-1))
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    roots = P.polyroots(c)
    # round the modulus so rounding noise cannot reorder roots on a common circle
    order = np.lexsort((np.angle(roots), np.round(np.abs(roots), 10)))
    return roots[order]


def _divide_out(coeffs, roots):
    """Quotient of ``coeffs`` by ``prod (z - r)``; remainder dropped."""
    divisor = P.polyfromroots(roots) if len(roots) else np.ones(1)
    quot, _ = P.polydiv(np.asarray(coeffs, dtype=complex), divisor)
    return np.atleast_1d(quot)


def reduce_lowest_terms(F, root_tol=ROOT_TOL):
    """Cancel denominator roots shared by every numerator component.

    Roots are compared after clustering at radius ``root_tol`` (relative to
    ``max(1, |root|)``). A cluster of several close denominator roots that
    is only partly matched by the numerator is left alone with an
    :class:`AmbiguousCancellationWarning`. When anything is cancelled the
    result is rescaled so the lowest nonzero denominator coefficient is 1.
    """
    if isinstance(F, PolynomialSphereMap) or F.is_polynomial:
        return F
    q_roots = poly_roots(F.denominator)
    comp_roots = []
    for i in range(F.target_dim):
        comp = _trim_rows(F.numerator[:, i])
        comp_roots.append(None if not np.any(comp) else poly_roots(comp))

    def close(a, b, radius):
        return abs(a - b) < radius * max(1.0, abs(a))

    cancel = []
    used = np.zeros(q_roots.size, dtype=bool)
    for k, rho in enumerate(q_roots):
        if used[k]:
            continue
        cluster = [j for j in range(q_roots.size) if not used[j] and close(rho, q_roots[j], 10 * root_tol)]
        used[cluster] = True
        shared = len(cluster)
        for roots in comp_roots:
            if roots is None:
                continue
            hits = sum(1 for r in roots if any(close(q_roots[j], r, root_tol) for j in cluster))
            shared = min(shared, hits)
        if shared == len(cluster):
            cancel.extend(q_roots[j] for j in cluster)
        elif shared > 0:
            warnings.warn(
                f"ambiguous cancellation near z = {rho}: {len(cluster)} denominator roots, "
                f"only {shared} shared; nothing cancelled",
                AmbiguousCancellationWarning,
                stacklevel=2,
            )
    if not cancel:
        return F
    den = _divide_out(F.denominator, cancel)
    comps = [_divide_out(F.numerator[:, i], cancel) for i in range(F.target_dim)]
    num = np.zeros((max(len(c) for c in comps), F.target_dim), dtype=complex)
    for i, comp in enumerate(comps):
        num[: len(comp), i] = comp
    lowest = den[np.flatnonzero(np.abs(den) > 0)[0]]
    return RationalSphereMap(num / lowest, den / lowest)


@dataclass(frozen=True)
class DenominatorForm:
    """``q(z) = c z^m prod_k (1 - conj(a_k) z)``."""

    c: complex
    m: int
    roots: np.ndarray
    circle_roots: tuple = field(default=())

    @property
    def K(self):
        return int(self.roots.size)

    @property
    def poles(self):
        """Zeros of ``q`` in the plane: ``0`` (``m`` times) and ``1/conj(a_k)``."""
        return np.concatenate([np.zeros(self.m, dtype=complex), 1.0 / self.roots.conj()])

    def reconstruct(self):
        coeffs = np.zeros(self.m + 1, dtype=complex)
        coeffs[self.m] = self.c
        for a in self.roots:
            coeffs = P.polymul(coeffs, [1.0, -np.conj(a)])
        return coeffs


def denominator_form(q, circle_tol=CIRCLE_TOL, root_tol=ROOT_TOL, sphere_map=False, proper=False):
    """Factor a denominator into the ``c z^m prod (1 - conj(a_k) z)`` form.

    Args:
        q: scalar polynomial coefficients (ascending).
        sphere_map: caller asserts ``q`` belongs to a reduced sphere map;
            a root on the circle is then an inconsistency.
        proper: caller asserts a reduced holomorphic proper map; any pole
            in the closed disk is then an inconsistency.
    """
    q = np.asarray(q, dtype=complex).reshape(-1)
    if not np.any(q):
        raise ValidationError("denominator is identically zero")
    q = _trim_rows(q)
    lead = q[-1]
    zs = poly_roots(q)
    tiny = np.abs(zs) < root_tol
    m = int(np.count_nonzero(tiny))
    rest = zs[~tiny]
    c = complex(lead * np.prod(-rest)) if rest.size else complex(lead)
    a = 1.0 / rest.conj()
    order = np.lexsort((np.angle(a), np.round(np.abs(a), 10)))
    a = a[order]
    on_circle = tuple(complex(x) for x in a if abs(abs(x) - 1.0) < circle_tol)
    form = DenominatorForm(c=c, m=m, roots=a, circle_roots=on_circle)
    if sphere_map and on_circle:
        raise InconsistencyError(
            f"reduced sphere map has denominator roots on the unit circle: {list(on_circle)}"
        )
    if proper:
        inside = [p for p in form.poles if abs(p) <= 1.0 + circle_tol]
        if inside:
            raise InconsistencyError(f"proper map has poles in the closed disk: {inside}")
    return form


def has_pole_in_closed_disk(F, circle_tol=CIRCLE_TOL):
    if isinstance(F, PolynomialSphereMap) or F.is_polynomial:
        return False
    return bool(np.any(np.abs(poly_roots(F.denominator)) <= 1.0 + circle_tol))


def degree_gap_check(F, tol=TOL, root_tol=ROOT_TOL):
    """Whether ``deg p > deg q`` for a reduced sphere map vanishing at 0.

    Raises:
        PreconditionError: with ``condition`` one of ``"reduced"``,
            ``"sphere_map"``, ``"vanishes_at_origin"``.
    """
    F = F.as_rational()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AmbiguousCancellationWarning)
        reduced = reduce_lowest_terms(F, root_tol)
    if reduced.denominator_degree != F.denominator_degree:
        raise PreconditionError("map is not reduced to lowest terms", "reduced")
    if not verify_rational(F, tol).is_sphere_map:
        raise PreconditionError("map is not a sphere map", "sphere_map")
    q0 = F.denominator[0]
    if q0 == 0 or np.linalg.norm(F.numerator[0]) / abs(q0) >= tol:
        raise PreconditionError("map does not vanish at the origin", "vanishes_at_origin")
    return F.numerator_degree > F.denominator_degree


# -- coefficient-level operations -------------------------------------------------


def rotate_source(F, theta):
    """``z -> F(e^{i theta} z)``."""
    if isinstance(F, PolynomialSphereMap):
        w = np.exp(1j * theta * np.arange(F.degree + 1))
        return PolynomialSphereMap(F.coeffs * w[:, None])
    wp = np.exp(1j * theta * np.arange(F.numerator.shape[0]))
    wq = np.exp(1j * theta * np.arange(F.denominator.shape[0]))
    return RationalSphereMap(F.numerator * wp[:, None], F.denominator * wq)


def apply_unitary(U, F):
    """``z -> U F(z)`` for a target matrix ``U`` (square, size ``N``)."""
    U = np.asarray(U, dtype=complex)
    if U.shape[1] != F.target_dim:
        raise DimensionError(f"unitary of size {U.shape} cannot act on {F.target_dim} components")
    if isinstance(F, PolynomialSphereMap):
        return PolynomialSphereMap(F.coeffs @ U.T)
    return RationalSphereMap(F.numerator @ U.T, F.denominator)


def multiply_by(F, zeta):
    """``z -> zeta(z) F(z)`` for a scalar rational function ``zeta``."""
    zeta = zeta.as_rational()
    if zeta.target_dim != 1:
        raise DimensionError("multiplier must be scalar valued")
    num = np.stack(
        [np.convolve(F.numerator[:, i], zeta.numerator[:, 0]) for i in range(F.target_dim)], axis=1
    )
    if isinstance(F, PolynomialSphereMap) and zeta.is_polynomial:
        return PolynomialSphereMap(num / zeta.denominator[0])
    den = P.polymul(F.as_rational().denominator, zeta.denominator)
    return RationalSphereMap(num, den)


def monomial(m, N=1):
    """``z^m`` in the first of ``N`` coordinates."""
    coeffs = np.zeros((m + 1, N), dtype=complex)
    coeffs[m, 0] = 1.0
    return PolynomialSphereMap(coeffs)


def identity_map(N):
    """``z (+) 0`` in ``C^N``."""
    return monomial(1, N)


def pointwise_distance(F, G, K=16):
    """Max over ``K`` circle points of ``||F - G||``."""
    z = circle_points(K)
    return float(np.max(np.linalg.norm(evaluate(F, z) - evaluate(G, z), axis=-1)))
