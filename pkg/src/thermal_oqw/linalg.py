"""Dense complex linear algebra and the fixed operators used throughout.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The qubit basis
order is (excited, ground) everywhere, so ``sigma_z = diag(+1, -1)``,
``sigma_plus = |e><g|`` and ``sigma_minus = |g><e|``.  Fock spaces are
truncated to photon numbers ``0..n_max``.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "pauli",
    "annihilation",
    "creation",
    "number",
    "adjoint",
    "commutator",
    "anticommutator",
    "frobenius_norm",
    "kron",
    "lindblad_term",
    "matrix_exponential",
    "hermitian_eigenvalues_2x2",
    "min_eigenvalues_2x2",
    "psd_sqrt_2x2",
]

_PAULI = {
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "identity": np.eye(2, dtype=complex),
}

# Taylor degree and scaling target for matrix_exponential; the truncation
# error is bounded by 0.5**19 / 19! ~ 1.6e-23 after scaling.
_TAYLOR_DEGREE = 18
_SCALED_NORM = 0.5


def pauli(which: str) -> np.ndarray:
    """Return one of ``plus``, ``minus``, ``z`` or ``identity`` as a fresh 2x2 array."""
    try:
        return _PAULI[which].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli operator {which!r}") from None


def annihilation(n_max: int) -> np.ndarray:
    """Photon annihilation operator on the Fock basis ``0..n_max``.

    Truncation makes ``[a, a^dagger]`` equal to the identity except at the
    last diagonal entry, which is ``-n_max``.
    """
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be a positive integer, got {n_max}")
    n_max = int(n_max)
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def creation(n_max: int) -> np.ndarray:
    return annihilation(n_max).conj().T


def number(n_max: int) -> np.ndarray:
    return np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def _check_square(*mats: np.ndarray) -> None:
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")
    shape = shapes.pop()
    if len(shape) < 2 or shape[-1] != shape[-2]:
        raise ValueError(f"expected square matrices, got shape {shape}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_square(a, b)
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_square(a, b)
    return a @ b + b @ a


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, ord="fro"))


def kron(*mats: np.ndarray) -> np.ndarray:
    """Tensor product, leftmost factor most significant in the index order."""
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def lindblad_term(n: np.ndarray, m: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Dissipative building block ``n rho m - (m n rho + rho m n) / 2``.

    Works on single matrices or on stacks sharing the trailing two axes.
    With ``m = n^dagger`` this is the usual GKSL dissipator of jump ``n``.
    """
    if n.shape[-2:] != m.shape[-2:] or n.shape[-2:] != rho.shape[-2:]:
        raise ValueError(
            f"dimension mismatch: {n.shape[-2:]}, {m.shape[-2:]}, {rho.shape[-2:]}"
        )
    if n.shape[-1] != n.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {n.shape}")
    mn = m @ n
    return n @ rho @ m - 0.5 * (mn @ rho + rho @ mn)


def matrix_exponential(a: np.ndarray) -> np.ndarray:
    """``exp(a)`` by scaling and squaring around a degree-18 Taylor polynomial."""
    a = np.asarray(a, dtype=complex)
    _check_square(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix_exponential: input has non-finite entries")
    dim = a.shape[0]
    norm = float(np.max(np.sum(np.abs(a), axis=0))) if dim else 0.0
    squarings = 0
    if norm > _SCALED_NORM:
        squarings = int(math.ceil(math.log2(norm / _SCALED_NORM)))
    scaled = a / (2.0**squarings)

    # Horner: I + x(I + x/2(I + x/3(...)))
    eye = np.eye(dim, dtype=complex)
    result = eye.copy()
    for j in range(_TAYLOR_DEGREE, 0, -1):
        result = eye + (scaled @ result) / j
    for _ in range(squarings):
        result = result @ result
    return result


def hermitian_eigenvalues_2x2(h: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Closed-form ascending eigenvalues of a 2x2 Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    mean = 0.5 * (h[0, 0].real + h[1, 1].real)
    half_gap = 0.5 * (h[0, 0].real - h[1, 1].real)
    radius = math.hypot(half_gap, abs(h[0, 1]))
    return np.array([mean - radius, mean + radius])


def min_eigenvalues_2x2(blocks: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of each Hermitian block in a ``(..., 2, 2)`` stack.

    Only the upper triangle and the real diagonal are read.
    """
    a = blocks[..., 0, 0].real
    d = blocks[..., 1, 1].real
    b = blocks[..., 0, 1]
    return 0.5 * (a + d) - np.hypot(0.5 * (a - d), np.abs(b))


def psd_sqrt_2x2(h: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Principal square root of a 2x2 positive semidefinite Hermitian matrix.

    Uses ``sqrt(H) = (H + sqrt(det H) I) / sqrt(tr H + 2 sqrt(det H))``.
    Eigenvalues down to ``-tol`` are treated as zero.
    """
    lo, hi = hermitian_eigenvalues_2x2(h)
    if lo < -tol:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3e})")
    lo, hi = max(lo, 0.0), max(hi, 0.0)
    s = math.sqrt(lo * hi)
    t = math.sqrt(lo + hi + 2.0 * s)
    if t == 0.0:
        return np.zeros((2, 2), dtype=complex)
    herm = 0.5 * (h + h.conj().T)
    return (herm + s * np.eye(2)) / t
