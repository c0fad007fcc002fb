"""Gram-matrix invariants and the unitary moduli of polynomial sphere maps.

For ``f = sum_j A_j z^j`` the Gram matrix is ``B[j, k] = <A_j, A_k>``.
Target unitaries leave it unchanged and a source rotation
``z -> e^{i theta} z`` multiplies ``B[j, k]`` by ``e^{i (j - k) theta}``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import as_matrix, psd_factor
from .constructions import random_sphere_map
from .errors import DimensionError, InconsistencyError, NotInModuliError
from .maps import (
    TOL,
    PolynomialSphereMap,
    apply_unitary,
    pointwise_distance,
    rotate_source,
)

WITNESS_TOL = 1e-8


def gram(f):
    """Hermitian matrix of coefficient inner products ``<A_j, A_k>``."""
    C = f.coeffs
    B = C @ C.conj().T
    return 0.5 * (B + B.conj().T)


def constraint_residual(B):
    """Residuals of the sphere-map system on a Gram matrix.

    Entry 0 is ``trace(B) - 1``; entry ``l`` is ``sum_k B[k+l, k]``.
    """
    B = as_matrix(B, "B")
    out = np.array([np.trace(B, offset=-l) for l in range(B.shape[0])])
    out[0] -= 1.0
    return out


def star_equivalent(B, C, tol=TOL):
    """Angle ``theta`` with ``B[j, j+m] = e^{i m theta} C[j, j+m]``, or ``None``.

    Among valid angles the smallest one in ``[0, 2 pi)`` is returned.
    """
    B = as_matrix(B, "B")
    C = as_matrix(C, "C")
    if B.shape != C.shape:
        raise DimensionError(f"Gram matrices differ in size: {B.shape} vs {C.shape}")
    if np.max(np.abs(np.abs(B) - np.abs(C))) >= tol:
        return None
    n = B.shape[0]
    if np.max(np.abs(np.diag(B) - np.diag(C))) >= tol:
        return None
    ref = None
    for m in range(1, n):
        diag_c = np.diagonal(C, offset=m)
        j = int(np.argmax(np.abs(diag_c)))
        if abs(diag_c[j]) > 10 * tol:
            ref = (m, j)
            break
    if ref is None:
        return 0.0
    m_ref, j = ref
    phase = np.angle(B[j, j + m_ref] / C[j, j + m_ref])
    candidates = sorted(((phase + 2 * np.pi * k) / m_ref) % (2 * np.pi) for k in range(m_ref))
    idx = np.arange(n)
    shift = idx[None, :] - idx[:, None]  # m = k - j
    for theta in candidates:
        if np.max(np.abs(B - np.exp(1j * shift * theta) * C)) < tol:
            return float(theta)
    return None


@dataclass(frozen=True)
class EquivalenceWitness:
    """``g = U o f o rotation(theta)`` for the two maps being compared."""

    theta: float
    target_unitary: Optional[np.ndarray] = None

    def apply(self, f):
        g = rotate_source(f, self.theta)
        if self.target_unitary is None:
            return g
        if g.target_dim < self.target_unitary.shape[0]:
            g = g.padded(self.target_unitary.shape[0])
        return apply_unitary(self.target_unitary, g)


def _procrustes(source, target):
    """Unitary ``U`` minimising ``||U source - target||`` (columns are vectors)."""
    X, _, Yh = np.linalg.svd(target @ source.conj().T)
    return X @ Yh


def unitarily_equivalent(f, g, tol=TOL, witness_tol=WITNESS_TOL):
    """Decide unitary equivalence of two polynomial sphere maps.

    Returns an :class:`EquivalenceWitness` with ``g = U o f o rotation(theta)``,
    or ``None``. Maps of different degree are never equivalent.

    Raises:
        InconsistencyError: the Grams match but the witness does not
            reproduce ``g`` pointwise within ``witness_tol``.
    """
    if f.degree != g.degree:
        return None
    theta = star_equivalent(gram(f), gram(g), tol)
    if theta is None:
        return None
    n = max(f.target_dim, g.target_dim)
    src = rotate_source(f, theta).padded(n).matrix
    dst = g.padded(n).matrix
    witness = EquivalenceWitness(theta, _procrustes(src, dst))
    err = pointwise_distance(witness.apply(f), g.padded(n))
    if err > witness_tol:
        raise InconsistencyError(
            f"Grams are *-equivalent (theta={theta:.6g}) but the witness misses g by {err:.3e}"
        )
    return witness


def gram_to_map(B, tol=TOL):
    """Polynomial sphere map in ``C^{d+1}`` whose Gram matrix is ``B``.

    Raises:
        NotInModuliError: ``B`` violates the constraint system beyond ``tol``.
    """
    B = as_matrix(B, "B")
    res = constraint_residual(B)
    if np.max(np.abs(res)) > tol:
        raise NotInModuliError(f"Gram matrix violates the sphere-map constraints: {res}", res)
    return PolynomialSphereMap(psd_factor(B).T)


def sample_moduli(d, seed):
    """Gram matrix of a seeded random degree-``d`` map into ``C^{d+1}``."""
    return gram(random_sphere_map(d, d + 1, seed))


def _hermitian_from_coords(x, n):
    H = np.zeros((n, n), dtype=complex)
    H[np.diag_indices(n)] = x[:n]
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    H[iu] = x[n : n + m] + 1j * x[n + m :]
    H[(iu[1], iu[0])] = H[iu].conj()
    return H


def _coords_from_hermitian(H):
    n = H.shape[0]
    iu = np.triu_indices(n, 1)
    return np.concatenate([np.diag(H).real, H[iu].real, H[iu].imag])


def _real_constraints(H):
    res = constraint_residual(H)
    return np.concatenate([[res[0].real], res[1:].real, res[1:].imag])


def constraint_jacobian(B, step=1e-6):
    """Central-difference Jacobian of the ``2d+1`` real constraints."""
    B = as_matrix(B, "B")
    n = B.shape[0]
    x0 = _coords_from_hermitian(B)
    J = np.zeros((2 * n - 1, x0.size))
    for i in range(x0.size):
        e = np.zeros_like(x0)
        e[i] = step
        J[:, i] = (
            _real_constraints(_hermitian_from_coords(x0 + e, n))
            - _real_constraints(_hermitian_from_coords(x0 - e, n))
        ) / (2 * step)
    return J


def moduli_tangent_rank(B, tol=TOL):
    """Real rank of the constraint Jacobian at ``B`` (``2d+1`` generically)."""
    res = constraint_residual(B)
    if np.max(np.abs(res)) > tol:
        raise NotInModuliError("Gram matrix is not in the moduli space", res)
    return int(np.linalg.matrix_rank(constraint_jacobian(B), tol=1e-6))


def moduli_dimension(B, tol=TOL):
    """Local real dimension ``(d+1)^2 - rank`` of the constraint set at ``B``."""
    n = np.asarray(B).shape[0]
    return n * n - moduli_tangent_rank(B, tol)
