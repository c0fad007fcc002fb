"""Partial normal forms and the low-degree families ``G`` and ``J``.

Normal-form matrices follow the column convention: column ``j`` holds the
coordinates of ``A_j`` in the constructed orthonormal basis ``e_0..e_d``,
so entry ``[k, j]`` is the ``e_k`` component of ``A_j``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import orthonormal_completion, qr_positive
from .automorphisms import BallAutomorphism, DiskAutomorphism, precompose
from .errors import (
    ClassificationError,
    DegreeError,
    InconsistencyError,
    NotASphereMapError,
    ValidationError,
)
from .maps import (
    TOL,
    PolynomialSphereMap,
    RationalSphereMap,
    identity_map,
    pointwise_distance,
    reduce_lowest_terms,
    rotate_source,
    upper_traces,
    verify,
    verify_polynomial,
)
from .moduli import WITNESS_TOL, EquivalenceWitness, gram, unitarily_equivalent

ZERO_TOL = 1e-12
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class NormalFormMatrix:
    """Coefficient matrix of a polynomial sphere map in a normalising basis.

    ``target_unitary @ f(e^{i source_rotation} z)`` has coordinates
    ``A @ (1, z, ..., z^d)`` in its first ``d+1`` entries and zeros after.
    """

    A: np.ndarray
    alpha: complex
    norm_A0: float
    norm_Ad: float
    target_unitary: np.ndarray
    source_rotation: float = 0.0
    flags: tuple = ()

    @property
    def degree(self):
        return self.A.shape[0] - 1

    @property
    def inner(self):
        d = self.degree
        return self.A[1:d, 1:d]

    def as_map(self):
        return PolynomialSphereMap(self.A.T)


def _canonical_columns(f):
    """Coefficient columns of ``f`` padded to at least ``d+1`` rows."""
    d, N = f.degree, f.target_dim
    n = max(N, d + 1)
    X = np.zeros((n, d + 1), dtype=complex)
    X[:N] = f.matrix
    return X


def normal_form(f, tol=TOL, make_alpha_real=False):
    """Partial normal form of a polynomial sphere map.

    One positive-diagonal QR of the reordered columns ``A_0, A_d, A_1, ...,
    A_{d-1}`` produces the basis: ``e_0`` along ``A_0``, ``e_d`` along the
    part of ``A_d`` orthogonal to it, and ``e_1..e_{d-1}`` making the inner
    block upper triangular with a nonnegative real diagonal. When
    ``A_0 = 0`` the order is ``A_d, A_1, ..., A_{d-1}`` and ``e_0`` is the
    remaining completion vector; ``alpha`` is then reported as 0.

    Raises:
        NotASphereMapError: ``f`` fails the identity system.
    """
    report = verify_polynomial(f, tol)
    if not report.is_sphere_map:
        raise NotASphereMapError(
            f"map is not a sphere map (max residual {report.max_residual:.3e}); "
            f"<A_0, A_d> residual {abs(report.residuals[-1]):.3e}"
        )
    d = f.degree
    X = _canonical_columns(f)
    n = X.shape[0]
    norm_a0 = float(np.linalg.norm(X[:, 0]))
    norm_ad = float(np.linalg.norm(X[:, d]))
    flags = []
    if d == 0:
        order, slots = [0], [0]
    elif norm_a0 > ZERO_TOL:
        order = [0, d] + list(range(1, d))
        slots = [0, d] + list(range(1, d))
    else:
        order = [d] + list(range(1, d)) + [0]
        slots = [d] + list(range(1, d)) + [0]
        flags.append("A0_zero")
    S = np.zeros((n, n), dtype=complex)
    S[:, : d + 1] = X[:, order]
    Q, _ = qr_positive(S)
    E = Q.copy()
    # QR column i becomes basis vector e_{slots[i]}; extra columns keep their place
    E[:, slots] = Q[:, : d + 1]
    U = E.conj().T
    full = U @ X
    if n > d + 1 and np.max(np.abs(full[d + 1 :])) > math.sqrt(tol):
        raise InconsistencyError("coefficients do not fit in d+1 dimensions after compression")
    A = full[: d + 1]
    alpha = 0j
    if d >= 2 and "A0_zero" not in flags:
        alpha = complex(-A[0, d - 1] / norm_ad)
    if np.linalg.matrix_rank(A, tol=1e-9) < d + 1:
        flags.append("rank_deficient")
    nf = NormalFormMatrix(A, alpha, norm_a0, norm_ad, U, 0.0, tuple(flags))
    if make_alpha_real and d >= 2 and abs(alpha) > ZERO_TOL:
        theta = -np.angle(alpha) / (d - 1)
        rotated = normal_form(rotate_source(f, theta), tol)
        return NormalFormMatrix(
            rotated.A, rotated.alpha, rotated.norm_A0, rotated.norm_Ad,
            rotated.target_unitary, float(theta), rotated.flags,
        )
    return nf


@dataclass(frozen=True)
class NormalStructureReport:
    zero_pattern: float
    diagonal: float
    alpha_consistency: float
    identities: np.ndarray
    trace: float
    quadratic_relation: Optional[float] = None
    linear_relation: Optional[float] = None
    trace_relation: Optional[float] = None
    flags: tuple = ()
    tol: float = 1e-8

    @property
    def max_residual(self):
        values = [self.zero_pattern, self.diagonal, self.alpha_consistency, self.trace]
        values += [float(np.max(np.abs(self.identities)))]
        values += [abs(v) for v in (self.quadratic_relation, self.linear_relation, self.trace_relation) if v is not None]
        return max(values)

    @property
    def passed(self):
        return self.max_residual < self.tol


def check_normal_structure(nf, tol=1e-8):
    """Residuals of every structural requirement of a normal-form matrix.

    Degree 2 additionally reports the relation
    ``(|A_0|^2 + |A_2|^2)(1 + |alpha|^2) + |a_11|^2 = 1``; degree 3 reports
    the linear identity among ``a_10, a_11, a_21, a_23`` and the trace
    condition.
    """
    A = np.asarray(nf.A)
    d = A.shape[0] - 1
    n0, nd, alpha = nf.norm_A0, nf.norm_Ad, nf.alpha
    zero = [0.0]
    if d >= 1:
        zero.append(np.max(np.abs(A[1:, 0])))
        zero.append(np.max(np.abs(A[:d, d])))
    if d >= 3:
        inner = A[1:d, 1:d]
        zero.append(np.max(np.abs(np.tril(inner, -1))))
    diag_entries = [A[0, 0] - n0, A[d, d] - nd] if d >= 1 else [A[0, 0] - n0]
    diagonal = max(abs(x) for x in diag_entries)
    for x in np.diag(A[1:d, 1:d]):
        diagonal = max(diagonal, abs(x.imag), max(0.0, -x.real))
    alpha_res = 0.0
    if d >= 2:
        alpha_res = max(abs(A[0, d - 1] + alpha * nd), abs(A[d, 1] - np.conj(alpha) * n0))
    identities = upper_traces(A.T)
    identities[0] -= 1.0
    trace = abs(np.sum(np.abs(A) ** 2) - 1.0)
    quadratic_relation = linear_relation = trace_relation = None
    if d == 2:
        quadratic_relation = float((n0**2 + nd**2) * (1 + abs(alpha) ** 2) + abs(A[1, 1]) ** 2 - 1.0)
    if d == 3:
        a10, a11, a21, a23 = A[0, 1], A[1, 1], A[1, 2], A[3, 2]
        linear_relation = complex(
            n0 * np.conj(a10)
            - np.conj(alpha) * a10 * nd
            + a11 * np.conj(a21)
            + np.conj(alpha) * n0 * np.conj(a23)
            + a23 * nd
        )
        trace_relation = float(np.sum(np.abs(A) ** 2) - 1.0)
    return NormalStructureReport(
        zero_pattern=float(max(zero)),
        diagonal=float(diagonal),
        alpha_consistency=float(alpha_res),
        identities=identities,
        trace=float(trace),
        quadratic_relation=quadratic_relation,
        linear_relation=linear_relation,
        trace_relation=trace_relation,
        flags=tuple(nf.flags),
        tol=tol,
    )


# -- the G and J families -----------------------------------------------------------


@dataclass(frozen=True)
class GParams:
    alpha: float
    r: float
    flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not 0 <= self.alpha < math.pi / 2:
            raise ValidationError(f"alpha must lie in [0, pi/2), got {self.alpha}")
        if not 0 <= self.r < 1:
            raise ValidationError(f"r must lie in [0, 1), got {self.r}")


@dataclass(frozen=True)
class JParams:
    alpha: float
    beta: float
    gamma: Optional[float] = None
    flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0 <= v < math.pi / 2:
                raise ValidationError(f"{name} must lie in [0, pi/2), got {v}")
        if self.gamma is not None and not 0 <= self.gamma <= math.pi / 2:
            raise ValidationError(f"gamma must lie in [0, pi/2], got {self.gamma}")


def make_G(params, N=2):
    """``G = (cos a (r - z)/(1 - r z), sin a, 0, ..., 0)``."""
    if N < 2:
        raise ValidationError("the G family needs at least 2 components")
    a, r = params.alpha, params.r
    num = np.zeros((2, N), dtype=complex)
    num[:, 0] = [math.cos(a) * r, -math.cos(a)]
    num[:, 1] = [math.sin(a), -math.sin(a) * r]
    return RationalSphereMap(num, [1.0, -r])


def make_J(params, N=None):
    """``J_{alpha,beta}`` (no gamma) or ``J_{alpha,beta,gamma} (+) 0``."""
    a, b, g = params.alpha, params.beta, params.gamma
    if g is None:
        N = 2 if N is None else N
        if N < 2:
            raise ValidationError("J_{alpha,beta} needs at least 2 components")
        C = np.zeros((3, N))
        C[2, :2] = [math.cos(a) * math.cos(b), 0.0]
        C[1, :2] = [math.sin(a) * math.sin(b), -math.sin(a) * math.cos(b)]
        C[0, :2] = [0.0, math.cos(a) * math.sin(b)]
        return PolynomialSphereMap(C)
    N = 3 if N is None else N
    if N < 3:
        raise ValidationError("J_{alpha,beta,gamma} needs at least 3 components")
    D = np.zeros((3, N))
    D[2, :3] = [math.cos(a) * math.cos(b), 0.0, 0.0]
    D[1, :3] = [
        math.sin(a) * math.sin(b) * math.sin(g),
        math.sin(a) * math.cos(g),
        -math.sin(a) * math.cos(b) * math.sin(g),
    ]
    D[0, :3] = [0.0, 0.0, math.cos(a) * math.sin(b)]
    return PolynomialSphereMap(D)


def _require_sphere(F, tol):
    report = verify(F, tol)
    if not report.is_sphere_map:
        raise NotASphereMapError(f"map is not a sphere map (max residual {report.max_residual:.3e})")


def _degree_one_data(F, tol):
    """``(A, B, c)`` with ``F = (z A + B) / (1 - conj(c) z)``."""
    F = reduce_lowest_terms(F.as_rational())
    if F.degree != 1:
        raise DegreeError(f"expected a degree-1 map, got degree {F.degree}")
    _require_sphere(F, tol)
    q = np.zeros(2, dtype=complex)
    q[: F.denominator.size] = F.denominator
    if abs(q[0]) <= ZERO_TOL * np.abs(q).sum():
        raise ValidationError("map has a pole at the origin; not a proper map")
    p = np.zeros((2, F.target_dim), dtype=complex)
    p[: F.numerator.shape[0]] = F.numerator
    c = -np.conj(q[1] / q[0])
    if abs(c) >= 1:
        raise ValidationError(f"denominator vanishes in the closed disk (|c| = {abs(c):.6g}); not a proper map")
    return F, p[1] / q[0], p[0] / q[0], complex(c)


def classify_degree1(F, tol=TOL, witness_tol=WITNESS_TOL):
    """``(GParams, witness)`` with ``G = U o F o rotation(theta)``.

    ``F`` must be a degree-1 holomorphic proper map. Polynomial input
    always yields ``r = 0``.
    """
    F, A, B, c = _degree_one_data(F, tol)
    r = abs(c)
    theta = float(np.angle(c)) % (2 * math.pi) if r > 0 else 0.0
    A2 = np.exp(1j * theta) * A
    A1 = (A2 + r * B) / (1 - r * r)
    B1 = (B + r * A2) / (1 - r * r)
    norm_a = float(np.linalg.norm(A1))
    if norm_a <= ZERO_TOL:
        raise InconsistencyError("degree-1 map lost its z-dependence after normalisation")
    alpha = math.atan2(float(np.linalg.norm(B1)), norm_a)
    n = max(F.target_dim, 2)
    S = np.zeros((n, n), dtype=complex)
    S[: F.target_dim, 0] = -A1
    S[: F.target_dim, 1] = B1
    Q, _ = qr_positive(S)
    flags = ("alpha_boundary",) if alpha < BOUNDARY_TOL else ()
    params = GParams(min(alpha, math.pi / 2 - 1e-15), r, flags)
    witness = EquivalenceWitness(theta, Q.conj().T)
    err = pointwise_distance(witness.apply(F.padded(n)), make_G(params, n))
    if err > witness_tol:
        raise ClassificationError(f"degree-1 classification does not validate (error {err:.3e})", [err])
    return params, witness


def equivalent_degree1(F, H, tol=TOL, param_tol=1e-8):
    """Witness ``H = U o F o rotation(theta)`` for degree-1 proper maps, or ``None``."""
    pf, wf = classify_degree1(F, tol)
    ph, wh = classify_degree1(H, tol)
    if abs(pf.alpha - ph.alpha) > param_tol or abs(pf.r - ph.r) > param_tol:
        return None
    n = max(wf.target_unitary.shape[0], wh.target_unitary.shape[0])

    def grow(U):
        out = np.eye(n, dtype=complex)
        out[: U.shape[0], : U.shape[0]] = U
        return out

    U = grow(wh.target_unitary).conj().T @ grow(wf.target_unitary)
    return EquivalenceWitness(float((wf.theta - wh.theta) % (2 * math.pi)), U)


def classify_degree2(f, tol=TOL):
    """``(JParams, witness)`` with ``J = U o f o rotation(theta)``.

    For two components the ``J_{alpha,beta}`` family is used, otherwise
    ``J_{alpha,beta,gamma}``. Boundary parameters are flagged, not
    rejected.

    Raises:
        ClassificationError: the constructed ``J`` is not unitarily
            equivalent to ``f``.
    """
    if not isinstance(f, PolynomialSphereMap):
        raise ValidationError("classify_degree2 expects a polynomial map")
    if f.degree != 2:
        raise DegreeError(f"expected a degree-2 map, got degree {f.degree}")
    _require_sphere(f, tol)
    A0, A1, A2 = f.coeffs
    n0, n1, n2 = (float(np.linalg.norm(v)) for v in (A0, A1, A2))
    alpha = math.asin(min(1.0, n1))
    beta = math.atan2(n0, n2)
    flags = []
    if alpha < BOUNDARY_TOL:
        flags.append("alpha_boundary")
    if beta < BOUNDARY_TOL:
        flags.append("beta_boundary")
    gamma = None
    if f.target_dim >= 3:
        w = A1.copy()
        for v, nv in ((A0, n0), (A2, n2)):
            if nv > ZERO_TOL:
                w = w - np.vdot(v, w) / nv**2 * v
        if math.sin(alpha) > tol:
            gamma = math.atan2(float(np.linalg.norm(A1 - w)), float(np.linalg.norm(w)))
        else:
            gamma = 0.0
            flags.append("gamma_undetermined")
        if gamma < BOUNDARY_TOL or abs(gamma - math.pi / 2) < BOUNDARY_TOL:
            flags.append("gamma_boundary")
    params = JParams(alpha, beta, gamma, tuple(flags))
    J = make_J(params, max(f.target_dim, 2 if gamma is None else 3))
    witness = unitarily_equivalent(f, J, tol=max(tol, 1e-9))
    if witness is None:
        diff = np.abs(gram(f) - gram(J))
        raise ClassificationError(
            f"degree-2 classification does not validate (max Gram modulus gap {diff.max():.3e})",
            diff,
        )
    return params, witness


def spherical_normalize_degree1(F, tol=TOL, witness_tol=WITNESS_TOL):
    """Automorphisms ``(psi, chi)`` with ``psi o F o chi = z (+) 0``.

    ``psi`` moves ``F(0)`` to the origin; its post-unitary then rotates the
    resulting ``c z`` onto ``z e_0``. The phase of ``c`` is absorbed by
    that unitary, so ``chi`` is the identity.
    """
    F, _, B, _ = _degree_one_data(F, tol)
    N = F.target_dim
    phi = BallAutomorphism(B)
    F1 = phi.compose(F)
    q = F1.denominator
    lead = F1.numerator[1] if F1.numerator.shape[0] > 1 else np.zeros(N)
    cvec = lead / q[0]
    if F1.denominator_degree > 0 and abs(q[1]) > math.sqrt(tol) * abs(q[0]):
        raise InconsistencyError("normalised degree-1 map kept a nonconstant denominator")
    Q, _ = qr_positive(_first_column(cvec, N))
    psi = BallAutomorphism(B, post_unitary=Q.conj().T)
    chi = DiskAutomorphism(0.0, 0.0)
    err = pointwise_distance(psi.compose(precompose(F, chi)), identity_map(N))
    if err > witness_tol:
        raise InconsistencyError(f"spherical normalisation does not validate (error {err:.3e})")
    return psi, chi


def _first_column(v, N):
    S = np.zeros((N, N), dtype=complex)
    S[:, 0] = v
    return S


__all__ = [
    "NormalFormMatrix",
    "NormalStructureReport",
    "GParams",
    "JParams",
    "normal_form",
    "check_normal_structure",
    "make_G",
    "make_J",
    "classify_degree1",
    "classify_degree2",
    "equivalent_degree1",
    "spherical_normalize_degree1",
    "orthonormal_completion",
]
