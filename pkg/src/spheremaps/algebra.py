"""Dense complex linear algebra used throughout the package.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
The inner product is linear in the first slot::

    <u, v> = sum_k u_k * conj(v_k)
"""

import numpy as np
from scipy import linalg as sla

from .errors import DimensionError, NotPSDError, ValidationError

UNITARY_TOL = 1e-9
PSD_TOL = 1e-9
HERMITIAN_TOL = 1e-9


def _as_array(x, name):
    try:
        return np.array(x, dtype=complex)
    except (ValueError, TypeError):
        raise DimensionError(f"{name} is ragged or not numeric") from None


def as_vector(v, name="vector"):
    arr = _as_array(v, name)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name} must be a nonempty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def as_matrix(m, name="matrix"):
    arr = _as_array(m, name)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError(f"{name} must be a nonempty 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def inner(u, v):
    """Inner product ``<u, v>``, linear in ``u``."""
    return complex(np.vdot(v, u))


def is_unitary(U, tol=UNITARY_TOL):
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) < tol)


def check_unitary(U, tol=UNITARY_TOL):
    U = as_matrix(U, "unitary")
    if U.shape[0] != U.shape[1]:
        raise DimensionError(f"unitary must be square, got {U.shape}")
    if not is_unitary(U, tol):
        dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
        raise ValidationError(f"matrix is not unitary: max |U*U - I| = {dev:.3e}")
    return U


def qr_positive(M):
    """Householder QR with a nonnegative real diagonal in ``R``.

    Reflections are skipped for columns that are already zero below the
    diagonal, so the factorisation of an upper triangular input only
    fixes phases. The result is deterministic.

    Returns:
        (Q, R) with ``M = Q @ R``, ``Q`` unitary and ``R`` upper triangular.
    """
    M = as_matrix(M, "M")
    n, m = M.shape
    if n != m:
        raise DimensionError(f"qr_positive needs a square matrix, got {M.shape}")
    R = M.copy()
    Q = np.eye(n, dtype=complex)
    for k in range(n - 1):
        x = R[k:, k]
        if not np.any(x[1:]):
            continue
        norm_x = np.linalg.norm(x)
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * norm_x
        v /= np.linalg.norm(v)
        R[k:, :] -= 2.0 * np.outer(v, v.conj() @ R[k:, :])
        Q[:, k:] -= 2.0 * np.outer(Q[:, k:] @ v, v.conj())
    diag = np.diag(R).copy()
    mags = np.abs(diag)
    phases = np.where(mags > 0, diag / np.where(mags > 0, mags, 1.0), 1.0)
    R = phases.conj()[:, None] * R
    Q = Q * phases[None, :]
    R = np.triu(R)
    R[np.diag_indices(n)] = mags
    return Q, R


def orthonormal_completion(vectors, dim):
    """Orthonormal basis of ``C^dim`` whose leading columns span ``vectors``.

    ``vectors`` is a (dim, k) array. Columns of the returned unitary are
    produced by :func:`qr_positive` on the zero-padded square matrix.
    """
    V = np.zeros((dim, dim), dtype=complex)
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    if vectors.shape[0] != dim or vectors.shape[1] > dim:
        raise DimensionError(f"cannot complete {vectors.shape} in dimension {dim}")
    V[:, : vectors.shape[1]] = vectors
    Q, _ = qr_positive(V)
    return Q


def random_unitary(n, rng):
    """Haar-random ``n x n`` unitary drawn from ``rng``."""
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, _ = qr_positive(G)
    return Q


class UnitaryInterpolant:
    """Continuous path ``t -> U**t`` in the unitary group.

    Eigenphases are taken in ``(-pi, pi]`` and scaled by ``t``. The
    decomposition is computed once, so repeated evaluation is cheap.
    """

    def __init__(self, U, tol=UNITARY_TOL):
        self.U = check_unitary(U, tol)
        T, Z = sla.schur(self.U, output="complex")
        phases = np.angle(np.diag(T))
        phases[phases <= -np.pi] = np.pi
        self.basis = Z
        self.phases = phases

    def __call__(self, t):
        t = float(t)
        n = self.U.shape[0]
        if t == 0.0:
            return np.eye(n, dtype=complex)
        if t == 1.0:
            return self.U.copy()
        return (self.basis * np.exp(1j * t * self.phases)[None, :]) @ self.basis.conj().T


def unitary_path(U, t, tol=UNITARY_TOL):
    """Point at parameter ``t`` on the eigenphase path from ``I`` to ``U``."""
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"t must lie in [0, 1], got {t}")
    return UnitaryInterpolant(U, tol)(t)


def psd_factor(H, psd_tol=PSD_TOL, hermitian_tol=HERMITIAN_TOL):
    """Columns ``V_0..V_d`` with ``<V_j, V_k> = H[j, k]``.

    Eigenvalues in ``[-psd_tol, 0)``, and positive ones at rounding level,
    are clamped to zero.
    """
    H = as_matrix(H, "H")
    if H.shape[0] != H.shape[1]:
        raise DimensionError(f"psd_factor needs a square matrix, got {H.shape}")
    skew = np.max(np.abs(H - H.conj().T))
    if skew > hermitian_tol:
        raise ValidationError(f"matrix is not Hermitian: max |H - H*| = {skew:.3e}")
    w, V = np.linalg.eigh(0.5 * (H + H.conj().T))
    if w[0] < -psd_tol:
        raise NotPSDError(f"matrix is not PSD: smallest eigenvalue {w[0]:.3e}", float(w[0]))
    # eigenvalues at rounding level are zero; their square roots would not be
    w = np.where(w <= 4 * H.shape[0] * np.finfo(float).eps * max(abs(w[-1]), 1.0), 0.0, w)
    # <V_j, V_k> = sum_i M_ij conj(M_ik) = (M^T conj M)_jk, so M* M must equal conj(H).
    return np.sqrt(w)[:, None] * V.T
