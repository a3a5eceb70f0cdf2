"""Realignment map, numerical rank, and Kronecker-product factorization.

A matrix U on an (m*n)-dimensional product space is a Kronecker product
X (x) Y exactly when its realignment has rank one; the best rank-one
truncation of the realignment therefore yields the nearest Kronecker
product in Frobenius norm, and for unitary U it recovers unitary factors
after rescaling.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .states import unitarity_defect
from .tolerances import RANK1_TOL, RANK_REL_TOL, RECON_TOL, UNITARITY_TOL


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacked entries of a matrix: (a11, ..., am1, a12, ..., amn)."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got {a.ndim} axes")
    return a.flatten(order="F")


def unvec(w: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec` for a rows x cols matrix."""
    w = np.asarray(w)
    if w.size != rows * cols:
        raise ValueError(f"vector of length {w.size} cannot fill {rows}x{cols}")
    return w.reshape((rows, cols), order="F")


def realign(z: np.ndarray, m: int, n: int) -> np.ndarray:
    """Realign an (m*n) x (m*n) matrix viewed as an m x m grid of n x n blocks.

    Row r = j*m + i of the result is vec(Z_ij), i.e. blocks are consumed down
    each block column first.  The map is an entry permutation, hence a
    Frobenius-norm isometry, and realign(X (x) Y) = vec(X) vec(Y)^t.
    """
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (m * n, m * n):
        raise ValueError(f"expected shape ({m * n}, {m * n}), got {z.shape}")
    blocks = z.reshape(m, n, m, n)  # [i, a, j, b] = Z[i*n + a, j*n + b]
    return np.ascontiguousarray(blocks.transpose(2, 0, 3, 1).reshape(m * m, n * n))


def numerical_rank(a: np.ndarray, rel_tol: float = RANK_REL_TOL) -> int:
    """Count singular values above rel_tol times the largest one.

    The zero matrix has rank 0.
    """
    s = np.linalg.svd(np.asarray(a, dtype=np.complex128), compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


@dataclass(frozen=True)
class KronFactorization:
    """Nearest Kronecker factorization U ~ X (x) Y of an (m*n) x (m*n) matrix.

    ``defect`` is sigma2/sigma1 of the realigned matrix: zero exactly for
    Kronecker products, one for maximally non-decomposable inputs.  For a
    unitary input that is decomposable, ``scale`` is the positive constant k
    with X X† = I/k, so sqrt(k) X and Y / sqrt(k) are the unitary factors.
    """

    x: np.ndarray
    y: np.ndarray
    scale: float
    defect: float
    decomposable: bool

    def product(self) -> np.ndarray:
        """The Kronecker product X (x) Y."""
        return np.kron(self.x, self.y)

    def unitary_factors(self) -> tuple[np.ndarray, np.ndarray]:
        """Rescaled factors (sqrt(k) X, Y / sqrt(k)); unitary when U was."""
        root = np.sqrt(self.scale)
        return root * self.x, self.y / root


def kron_factorize(
    u: np.ndarray, m: int, n: int, rank1_tol: float = RANK1_TOL
) -> KronFactorization:
    """Best Frobenius-norm approximation of U by a single Kronecker product.

    Takes the dominant singular triple of the realigned matrix; since
    realignment is an isometry this is optimal over all X (x) Y.  The scalar
    ambiguity (cX) (x) (Y/c) is fixed by balancing ||X||_F = ||Y||_F and
    making the largest-magnitude entry of X real and positive.
    """
    u = np.asarray(u, dtype=np.complex128)
    tilde = realign(u, m, n)
    w, s, vh = np.linalg.svd(tilde)
    if s[0] == 0.0:
        return KronFactorization(
            x=np.zeros((m, m), dtype=np.complex128),
            y=np.zeros((n, n), dtype=np.complex128),
            scale=1.0,
            defect=0.0,
            decomposable=True,
        )
    defect = float(s[1] / s[0]) if s.size > 1 else 0.0
    root = np.sqrt(s[0])
    x = unvec(root * w[:, 0], m, m)
    y = unvec(root * vh[0, :], n, n)

    pivot = x.flat[np.argmax(np.abs(x))]
    phase = pivot / abs(pivot)
    x = x * phase.conjugate()
    y = y * phase

    # ||X||_F^2 equals sigma1, so for decomposable unitaries k = m / sigma1.
    scale = m / float(s[0])
    return KronFactorization(
        x=x, y=y, scale=scale, defect=defect, decomposable=defect <= rank1_tol
    )


def is_unitarily_decomposable(
    u: np.ndarray,
    m: int,
    n: int,
    rank1_tol: float = RANK1_TOL,
    unitarity_tol: float = UNITARITY_TOL,
    recon_tol: float = RECON_TOL,
) -> KronFactorization:
    """Test whether a unitary U factors as a Kronecker product of unitaries.

    Non-unitary input is rejected with ``ValueError`` (a caller bug, distinct
    from a unitary that merely fails to factor).  On a rank-one realignment
    the rescaled factors are verified to be unitary and to reproduce U within
    ``recon_tol``; any verification failure downgrades the result to
    not-decomposable while keeping the diagnostic defect.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (m * n, m * n):
        raise ValueError(f"expected shape ({m * n}, {m * n}), got {u.shape}")
    defect = unitarity_defect(u)
    if defect > unitarity_tol:
        raise ValueError(
            f"input is not unitary (defect {defect:.3e} > {unitarity_tol})"
        )
    f = kron_factorize(u, m, n, rank1_tol)
    if not f.decomposable:
        return f
    u1, u2 = f.unitary_factors()
    residual = float(np.linalg.norm(u - f.product()))
    if (
        unitarity_defect(u1) > unitarity_tol
        or unitarity_defect(u2) > unitarity_tol
        or residual > recon_tol
    ):
        return dataclasses.replace(f, decomposable=False)
    return f
