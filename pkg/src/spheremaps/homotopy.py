"""Homotopies of proper maps from the disk to a ball.

A path is a flat list of segments. Each segment is a family ``s -> H_s``
of sphere maps on ``[0, 1]``; the global parameter ``t`` is split evenly
among the segments.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .algebra import UnitaryInterpolant, qr_positive
from .automorphisms import BallAutomorphism, DiskAutomorphism
from .errors import (
    DimensionError,
    InconsistencyError,
    UnsupportedError,
    ValidationError,
)
from .maps import (
    TOL,
    PolynomialSphereMap,
    RationalSphereMap,
    apply_unitary,
    circle_points,
    circle_sample_residual,
    evaluate,
    has_pole_in_closed_disk,
    identity_map,
    multiply_by,
    pointwise_distance,
    reduce_lowest_terms,
    trim_small,
    verify,
)

SEGMENT_KINDS = (
    "UnitaryPath",
    "AutomorphismDeformation",
    "PadSwap",
    "MultiplyByFactor",
    "Reparametrized",
)
JUNCTION_POINTS = 16


def _check_t(t):
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"t must lie in [0, 1], got {t}")
    return float(t)


@dataclass(frozen=True, eq=False)
class HomotopySegment:
    """One piece ``s -> family(s)`` of a homotopy, ``s`` in ``[0, 1]``."""

    kind: str
    family: Callable
    payload: dict = field(default_factory=dict)
    polynomial: bool = False

    def __post_init__(self):
        if self.kind not in SEGMENT_KINDS:
            raise ValidationError(f"unknown segment kind {self.kind!r}")

    def __call__(self, s):
        return self.family(_check_t(s))

    @property
    def start(self):
        return self.family(0.0)

    @property
    def end(self):
        return self.family(1.0)


@dataclass(frozen=True, eq=False)
class HomotopyPath:
    """Concatenation of segments from ``start`` to ``end`` in ``C^target_dim``."""

    segments: tuple
    target_dim: int
    start: object
    end: object
    depth: int = 0

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def polynomial(self):
        return all(seg.polynomial for seg in self.segments)

    def locate(self, t):
        """Segment index and local parameter for global ``t``."""
        t = _check_t(t)
        n = len(self.segments)
        if n == 0:
            return None, 0.0
        k = min(int(t * n), n - 1)
        return k, min(1.0, t * n - k)

    def at(self, t):
        """The map ``H_t``."""
        k, s = self.locate(t)
        if k is None:
            return self.start
        return self.segments[k](s)

    def __call__(self, t, z):
        return evaluate(self.at(t), z)

    def manifest(self):
        """Segment descriptions in path order."""
        return [dict(kind=seg.kind, **seg.payload) for seg in self.segments]

    def reversed(self):
        """The same path traversed from ``end`` to ``start``."""
        segs = [
            HomotopySegment(
                "Reparametrized",
                (lambda s, seg=seg: seg(1.0 - s)),
                {"reversed": seg.kind},
                seg.polynomial,
            )
            for seg in reversed(self.segments)
        ]
        return HomotopyPath(segs, self.target_dim, self.end, self.start, self.depth)

    def __add__(self, other):
        if other.target_dim != self.target_dim:
            raise DimensionError("paths live in different target dimensions")
        return HomotopyPath(
            self.segments + other.segments,
            self.target_dim,
            self.start,
            other.end,
            max(self.depth, other.depth),
        )


def constant_path(F):
    seg = HomotopySegment("Reparametrized", lambda s: F, {"constant": True}, isinstance(F, PolynomialSphereMap))
    return HomotopyPath([seg], F.target_dim, F, F)


def unitary_segment(F, U):
    """Segment ``s -> U**s F`` from ``F`` to ``U F``."""
    interp = UnitaryInterpolant(U)
    poly = isinstance(F, PolynomialSphereMap)
    return HomotopySegment(
        "UnitaryPath",
        lambda s: apply_unitary(interp(s), F),
        {"unitary": interp.U},
        poly,
    )


# -- elementary homotopies ----------------------------------------------------------


def mobius_identity_path(a, theta, t):
    """Disk automorphism with ``a`` and ``theta`` scaled by ``1 - t``."""
    if abs(a) >= 1:
        raise ValidationError(f"disk automorphism needs |a| < 1, got {a}")
    t = _check_t(t)
    return DiskAutomorphism((1 - t) * a, (1 - t) * theta)


def _pad_swap_map(F, t):
    c, s = math.sqrt(max(0.0, 1.0 - t * t)), t
    N = F.target_dim
    if isinstance(F, PolynomialSphereMap):
        rows = max(F.degree + 1, 2)
        out = np.zeros((rows, N + 1), dtype=complex)
        out[: F.degree + 1, :N] = c * F.coeffs
        out[1, N] = s
        return PolynomialSphereMap(out)
    F = F.as_rational()
    q = F.denominator
    rows = max(F.numerator.shape[0], q.size + 1)
    out = np.zeros((rows, N + 1), dtype=complex)
    out[: F.numerator.shape[0], :N] = c * F.numerator
    out[1 : q.size + 1, N] = s * q
    return RationalSphereMap(out, q)


def pad_swap_path(F, t=None):
    """``(sqrt(1 - t^2) F, t z)`` from ``F (+) 0`` to ``0 (+) z``.

    With ``t`` given the single map is returned, otherwise the whole path.
    """
    if t is not None:
        return _pad_swap_map(F, _check_t(t))
    seg = HomotopySegment(
        "PadSwap",
        lambda s: _pad_swap_map(F, s),
        {"components": F.target_dim + 1},
        isinstance(F, PolynomialSphereMap),
    )
    return HomotopyPath([seg], F.target_dim + 1, seg.start, seg.end)


def _is_z_power(zeta):
    if not isinstance(zeta, PolynomialSphereMap) or zeta.target_dim != 1:
        return False
    c = zeta.coeffs[:, 0]
    return bool(np.all(c[:-1] == 0) and abs(abs(c[-1]) - 1) < 1e-12)


def _check_inner(zeta, tol):
    zeta = zeta if isinstance(zeta, PolynomialSphereMap) else zeta.as_rational()
    if zeta.target_dim != 1:
        raise ValidationError("multiplier must be scalar valued")
    if not isinstance(zeta, PolynomialSphereMap) and has_pole_in_closed_disk(zeta):
        raise ValidationError("multiplier has a pole in the closed disk")
    res = circle_sample_residual(zeta, 64)
    if res >= tol:
        raise ValidationError(f"multiplier is not inner: | |zeta|^2 - 1 | = {res:.3e} on the circle")
    return zeta


def _times_last(F, zeta):
    coeffs = F.coeffs
    m = zeta.degree
    out = np.zeros((coeffs.shape[0] + m, coeffs.shape[1]), dtype=complex)
    out[: coeffs.shape[0], :-1] = coeffs[:, :-1]
    out[m:, -1] = coeffs[:, -1] * zeta.coeffs[m, 0]
    return PolynomialSphereMap(out)


def multiply_path(path, mode, zeta, tol=1e-8):
    """Multiply every map of a path by an inner function ``zeta``.

    ``mode="whole"`` multiplies all components; ``mode="last_component"``
    multiplies only the last one and needs ``zeta = z^m`` and a polynomial
    path.
    """
    zeta = _check_inner(zeta, tol)
    if mode == "whole":
        times = lambda F: multiply_by(F, zeta)  # noqa: E731
        poly = isinstance(zeta, PolynomialSphereMap)
    elif mode == "last_component":
        if not _is_z_power(zeta):
            raise ValidationError("last_component mode needs zeta = z^m")
        if not path.polynomial:
            raise ValidationError("last_component mode needs a path of polynomial maps")
        times = lambda F: _times_last(F, zeta)  # noqa: E731
        poly = True
    else:
        raise ValidationError(f"unknown multiplication mode {mode!r}")
    segs = [
        HomotopySegment(
            "MultiplyByFactor",
            (lambda s, seg=seg: times(seg(s))),
            {"mode": mode, "factor_degree": zeta.degree, "inner": dict(kind=seg.kind, **seg.payload)},
            poly and seg.polynomial,
        )
        for seg in path.segments
    ]
    return HomotopyPath(segs, path.target_dim, times(path.start), times(path.end), path.depth)


# -- paths to the identity ----------------------------------------------------------


def _send_to(v, index, N):
    """Unitary with ``U v = ||v|| e_index``."""
    S = np.zeros((N, N), dtype=complex)
    S[:, 0] = v
    Q, _ = qr_positive(S)
    U = Q.conj().T
    perm = np.roll(np.eye(N), index, axis=0)
    return perm @ U


def _center_at_origin(F):
    """Segments from ``F`` to ``phi_{F(0)} o F`` and that map (``F(0) = 0``)."""
    a = evaluate(F, 0.0)
    if np.linalg.norm(a) < 1e-14:
        return [], F
    minus = -np.eye(F.target_dim, dtype=complex)
    flip = unitary_segment(F, minus)
    deform = HomotopySegment(
        "AutomorphismDeformation",
        lambda s: BallAutomorphism(s * a).compose(F),
        {"center": a},
    )
    return [flip, deform], BallAutomorphism(a).compose(F)


def _clean_centered(F1, rtol=1e-9):
    """Zero the constant numerator term and trim rounding-level top coefficients."""
    p = np.array(F1.numerator)
    q = F1.denominator
    scale = max(np.abs(p).max(), np.abs(q).max())
    if np.abs(p[0]).max() > 1e-8 * scale:
        raise InconsistencyError(f"centered map does not vanish at 0 (|p(0)| = {np.abs(p[0]).max():.3e})")
    p[0] = 0
    return RationalSphereMap(trim_small(p, rtol), trim_small(q, rtol))


def center_at_origin(F):
    """``phi_{F(0)} o F`` with ``F(0)`` moved to the origin, cleaned of rounding.

    The constant numerator term is set to exactly zero and top coefficients
    below ``1e-9`` relative are dropped, so degrees are exact.
    """
    F = F.as_rational()
    a = evaluate(F, 0.0)
    if np.linalg.norm(a) < 1e-14:
        return _clean_centered(F)
    return _clean_centered(BallAutomorphism(a).compose(F))


def _drop_factor_z(F1):
    """``F1 / z`` for ``F1(0) = 0``."""
    F1 = _clean_centered(F1)
    p = F1.numerator[1:] if F1.numerator.shape[0] > 1 else np.zeros((1, F1.target_dim))
    return RationalSphereMap(p, F1.denominator)


def _rational_steps(F):
    """Segments from degree-``d`` ``F`` (``N >= 2`` components) to ``z (+) 0``."""
    N = F.target_dim
    d = F.degree
    if d < 1:
        raise ValidationError("a proper map has degree at least 1")
    segs, centered = _center_at_origin(F)
    F2 = _drop_factor_z(centered)
    if d == 1:
        if F2.degree != 0:
            raise InconsistencyError("degree-1 map kept a nonconstant quotient after centering")
        c = F2.numerator[0] / F2.denominator[0]
        segs.append(unitary_segment(centered, _send_to(c, 0, N)))
        return segs, 1
    if F2.degree != d - 1:
        raise InconsistencyError(
            f"dividing the centered map by z gave degree {F2.degree}, expected {d - 1}"
        )
    inner, depth = _rational_steps(F2)
    z = PolynomialSphereMap(np.array([[0.0], [1.0]]))
    lifted = multiply_path(HomotopyPath(inner, N, F2, identity_map(N)), "whole", z)
    segs.extend(lifted.segments)
    segs.extend(_square_to_identity(N))
    return segs, depth + 1


def _square_to_identity(N):
    """Segments from ``z^2 (+) 0`` to ``z (+) 0`` inside ``C^N``."""

    def swap(s):
        out = np.zeros((3, N), dtype=complex)
        out[2, 0] = math.sqrt(max(0.0, 1.0 - s * s))
        out[1, 1] = s
        return PolynomialSphereMap(out)

    pad = HomotopySegment("PadSwap", swap, {"components": N}, True)
    R = np.eye(N, dtype=complex)
    R[:2, :2] = [[0, 1], [-1, 0]]
    return [pad, unitary_segment(pad.end, R)]


def rational_to_identity_path(F, N=None):
    """Homotopy of proper maps from ``F`` to ``z (+) 0`` in ``C^N``.

    ``F`` must be a rational proper map (no poles in the closed disk). Each
    recursion level moves ``F(0)`` to the origin with a ball automorphism,
    divides by ``z`` and lifts the shorter path back, so ``depth`` equals the
    degree.

    Raises:
        UnsupportedError: ``N = 1``.
        ValidationError: ``F`` is not a proper sphere map.
    """
    F = F.as_rational()
    N = F.target_dim if N is None else N
    if N < 2:
        raise UnsupportedError("target dimension 1 has one homotopy class per degree (z^k)")
    if F.target_dim > N:
        raise DimensionError(f"map has {F.target_dim} components, requested N = {N}")
    report = verify(F)
    if not report.is_sphere_map:
        raise ValidationError(f"map is not a sphere map (max residual {report.max_residual:.3e})")
    F = reduce_lowest_terms(F)
    if has_pole_in_closed_disk(F):
        raise ValidationError("map has a pole in the closed disk; not a proper map")
    F = F.padded(N)
    segs, depth = _rational_steps(F)
    return HomotopyPath(segs, N, F, identity_map(N), depth)


def _polynomial_steps(f):
    N = f.target_dim
    d = f.degree
    if d == 0:
        c = f.coeffs[0]
        V = _send_to(c, N - 1, N)
        seg = unitary_segment(f, V)

        def rise(s):
            out = np.zeros((2, N), dtype=complex)
            out[1, 0] = s
            out[0, N - 1] = math.sqrt(max(0.0, 1.0 - s * s))
            return PolynomialSphereMap(out)

        return [seg, HomotopySegment("PadSwap", rise, {"components": N}, True)], 0
    U = _send_to(f.coeffs[-1], N - 1, N)
    first = unitary_segment(f, U)
    g = apply_unitary(U, f).coeffs.copy()
    scale = np.abs(g).max()
    if np.abs(g[0, -1]) > 1e-8 * scale or np.abs(g[-1, :-1]).max(initial=0.0) > 1e-8 * scale:
        raise InconsistencyError("rotated map does not have the expected zero coefficients")
    h = np.zeros((d, N), dtype=complex)
    h[:, :-1] = g[:d, :-1]
    h[:, -1] = g[1:, -1]
    inner, depth = _polynomial_steps(PolynomialSphereMap(h))
    z = PolynomialSphereMap(np.array([[0.0], [1.0]]))
    lifted = multiply_path(
        HomotopyPath(inner, N, PolynomialSphereMap(h), identity_map(N)), "last_component", z
    ).segments
    return [first] + list(lifted), depth + 1


def polynomial_to_identity_path(f, N=None):
    """Homotopy through polynomial sphere maps from ``f`` to ``z (+) 0``.

    Every intermediate map has exactly ``N`` components and degree at most
    ``max(deg f, 1)``.

    Raises:
        UnsupportedError: ``N = 1``.
    """
    if not isinstance(f, PolynomialSphereMap):
        raise ValidationError("polynomial_to_identity_path expects a polynomial map")
    N = f.target_dim if N is None else N
    if N < 2:
        raise UnsupportedError("target dimension 1 has one homotopy class per degree (z^k)")
    if f.target_dim > N:
        raise DimensionError(f"map has {f.target_dim} components, requested N = {N}")
    report = verify(f)
    if not report.is_sphere_map:
        raise ValidationError(f"map is not a sphere map (max residual {report.max_residual:.3e})")
    f = f.padded(N)
    if f.degree == 1 and np.linalg.norm(f.coeffs[0]) < 1e-14:
        # already z times a unit vector: one rotation suffices
        return HomotopyPath([unitary_segment(f, _send_to(f.coeffs[1], 0, N))], N, f, identity_map(N), 1)
    segs, depth = _polynomial_steps(f)
    return HomotopyPath(segs, N, f, identity_map(N), depth)


# -- verification -------------------------------------------------------------------


@dataclass
class PathReport:
    passed: bool
    max_residual: float
    endpoint_error: float
    junction_errors: list
    worst_junction: Optional[int]
    continuity_modulus: float
    continuity_bound: float
    max_degree: int
    rows: list
    tol: float

    @property
    def failure(self):
        if self.passed:
            return None
        if self.worst_junction is not None and self.junction_errors[self.worst_junction] >= self.tol:
            k = self.worst_junction
            return f"discontinuity between segments {k} and {k + 1} (gap {self.junction_errors[k]:.3e})"
        if self.endpoint_error >= self.tol:
            return f"endpoints differ from the declared maps by {self.endpoint_error:.3e}"
        return f"sample residual {self.max_residual:.3e} exceeds tol {self.tol:.1e}"


def verify_path(path, K_t=21, K_z=64, tol=1e-8):
    """Sample ``| ||H_t(e^{i theta})||^2 - 1 |`` on a ``K_t`` by ``K_z`` grid.

    Also compares the path ends with the declared endpoints and adjacent
    segment ends with each other. The continuity modulus (largest sup-norm
    jump between consecutive ``t`` samples) is reported, not enforced.
    """
    z = circle_points(K_z)
    thetas = 2 * np.pi * np.arange(K_z) / K_z
    rows = []
    worst = 0.0
    modulus = 0.0
    prev = None
    max_degree = 0
    for i in range(K_t):
        t = i / (K_t - 1) if K_t > 1 else 0.0
        H = path.at(t)
        max_degree = max(max_degree, H.degree)
        vals = evaluate(H, z)
        res = np.abs(np.sum(np.abs(vals) ** 2, axis=-1) - 1.0)
        worst = max(worst, float(res.max()))
        rows.extend((t, float(th), float(r)) for th, r in zip(thetas, res))
        if prev is not None:
            modulus = max(modulus, float(np.max(np.linalg.norm(vals - prev, axis=-1))))
        prev = vals
    endpoint = max(
        pointwise_distance(path.at(0.0), path.start, JUNCTION_POINTS),
        pointwise_distance(path.at(1.0), path.end, JUNCTION_POINTS),
    )
    junctions = [
        pointwise_distance(a.end, b.start, JUNCTION_POINTS)
        for a, b in zip(path.segments[:-1], path.segments[1:])
    ]
    worst_junction = int(np.argmax(junctions)) if junctions else None
    passed = worst < tol and endpoint < tol and all(j < tol for j in junctions)
    return PathReport(
        passed=passed,
        max_residual=worst,
        endpoint_error=float(endpoint),
        junction_errors=junctions,
        worst_junction=worst_junction,
        continuity_modulus=modulus,
        continuity_bound=10.0 * (1.0 / K_t) ** 0.5,
        max_degree=max_degree,
        rows=rows,
        tol=tol,
    )


__all__ = [
    "BallAutomorphism",
    "DiskAutomorphism",
    "HomotopySegment",
    "HomotopyPath",
    "PathReport",
    "constant_path",
    "center_at_origin",
    "mobius_identity_path",
    "pad_swap_path",
    "multiply_path",
    "rational_to_identity_path",
    "polynomial_to_identity_path",
    "verify_path",
]
