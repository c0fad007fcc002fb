"""Automorphisms of the unit ball and of the unit disk."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .algebra import as_vector, check_unitary
from .errors import DimensionError, ValidationError
from .maps import RationalSphereMap, apply_unitary, rotate_source


def _pad_rows(arr, rows):
    out = np.zeros((rows,) + arr.shape[1:], dtype=complex)
    out[: arr.shape[0]] = arr
    return out


@dataclass(frozen=True, eq=False)
class BallAutomorphism:
    """``w -> post @ phi_a(pre @ w)`` with the standard involution ``phi_a``.

    ``phi_a(w) = (a - P_a w - s Q_a w) / (1 - <w, a>)``, ``s = sqrt(1 - |a|^2)``,
    where ``P_a`` projects onto ``a`` and ``Q_a = I - P_a``. Note
    ``phi_0 = -I``.
    """

    center: np.ndarray
    pre_unitary: Optional[np.ndarray] = None
    post_unitary: Optional[np.ndarray] = None

    def __post_init__(self):
        a = as_vector(self.center, "center")
        if np.linalg.norm(a) >= 1:
            raise ValidationError(f"automorphism center must lie in the open ball, |a| = {np.linalg.norm(a)}")
        object.__setattr__(self, "center", a)
        for name in ("pre_unitary", "post_unitary"):
            U = getattr(self, name)
            if U is not None:
                U = check_unitary(U)
                if U.shape[0] != a.size:
                    raise DimensionError(f"{name} has size {U.shape[0]}, center has {a.size}")
                object.__setattr__(self, name, U)

    @property
    def dim(self):
        return self.center.size

    def _phi(self, w):
        a = self.center
        s = np.sqrt(1.0 - np.vdot(a, a).real)
        wa = w @ a.conj()
        return (a - s * w - (wa / (1.0 + s))[..., None] * a) / (1.0 - wa)[..., None]

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        if self.pre_unitary is not None:
            w = w @ self.pre_unitary.T
        out = self._phi(w)
        if self.post_unitary is not None:
            out = out @ self.post_unitary.T
        return out

    def compose(self, F):
        """The rational sphere map ``self o F``."""
        F = F.as_rational()
        if F.target_dim != self.dim:
            raise DimensionError(f"map has {F.target_dim} components, automorphism acts on C^{self.dim}")
        if self.pre_unitary is not None:
            F = apply_unitary(self.pre_unitary, F)
        a = self.center
        s = np.sqrt(1.0 - np.vdot(a, a).real)
        rows = max(F.numerator.shape[0], F.denominator.shape[0])
        p = _pad_rows(F.numerator, rows)
        q = _pad_rows(F.denominator, rows)
        pa = p @ a.conj()
        num = np.outer(q, a) - s * p - np.outer(pa / (1.0 + s), a)
        G = RationalSphereMap(num, q - pa)
        if self.post_unitary is not None:
            G = apply_unitary(self.post_unitary, G)
        return G


@dataclass(frozen=True)
class DiskAutomorphism:
    """``z -> e^{i theta} (z - a) / (1 - conj(a) z)``."""

    a: complex = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if abs(self.a) >= 1:
            raise ValidationError(f"disk automorphism needs |a| < 1, got {self.a}")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.theta) * (z - self.a) / (1 - np.conj(self.a) * z)

    def as_rational(self):
        u = np.exp(1j * self.theta)
        return RationalSphereMap(np.array([[-self.a * u], [u]]), [1.0, -np.conj(self.a)])

    @property
    def is_identity(self):
        return self.a == 0 and self.theta % (2 * np.pi) == 0


def precompose(F, chi):
    """The map ``F o chi`` with denominators cleared."""
    F = F.as_rational()
    if chi.a == 0:
        G = rotate_source(F, chi.theta)
        return G.as_polynomial() if G.is_polynomial else G
    D = F.degree
    u = np.exp(1j * chi.theta)
    lin = np.array([-chi.a * u, u])
    den_lin = np.array([1.0, -np.conj(chi.a)])

    def substitute(coeffs):
        total = np.zeros(D + 1, dtype=complex)
        for j, c in enumerate(coeffs):
            term = P.polymul(P.polypow(lin, j), P.polypow(den_lin, D - j)) * c
            total[: term.size] += term
        return total

    num = np.stack([substitute(F.numerator[:, i]) for i in range(F.target_dim)], axis=1)
    return RationalSphereMap(num, substitute(F.denominator))

