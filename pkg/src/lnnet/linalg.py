"""Symmetric eigensolver and the Cholesky-whitened generalized eigenproblem."""
from __future__ import annotations

import numpy as np

from .errors import ShapeError, SingularScatterError


def jacobi_eigh(A, max_sweeps: int = 50, rel_tol: float = 1e-12):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns ``(w, V)`` with eigenvalues ascending and ``A V = V diag(w)``.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ShapeError(f"jacobi_eigh needs a square matrix, got {A.shape}")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    tol = rel_tol * max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(apq) < 1e-300 * max(abs(diff), 1.0):
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = diff / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows/cols p, q
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def min_generalized_eig(M, N, eps_pd: float = 1e-10):
    """Smallest eigenpair of ``N^{-1} M`` for symmetric ``M`` and SPD ``N``.

    Whitens with ``N = L L^T`` and solves the symmetric problem
    ``L^{-1} M L^{-T} y = lam y``; the returned vector ``u = L^{-T} y`` is
    scaled to unit Euclidean norm. Also returns the multiplicity of the
    smallest eigenvalue (eigenvalues within 1e-8 of it).
    """
    M = np.asarray(M, dtype=float)
    N = np.asarray(N, dtype=float)
    Ns = 0.5 * (N + N.T)
    wN, _ = jacobi_eigh(Ns)
    scale = max(np.trace(Ns), np.finfo(float).tiny)
    if wN[0] < eps_pd * scale:
        raise SingularScatterError(
            f"total scatter is singular (min eigenvalue {wN[0]:.3g}, trace {scale:.3g})"
        )
    L = np.linalg.cholesky(Ns)
    Linv = np.linalg.solve(L, np.eye(L.shape[0]))
    S = Linv @ (0.5 * (M + M.T)) @ Linv.T
    w, Y = jacobi_eigh(S)
    u = Linv.T @ Y[:, 0]
    u = u / np.linalg.norm(u)
    multiplicity = int(np.sum(w - w[0] < 1e-8))
    return float(w[0]), u, multiplicity


def psd_cholesky(A, tol: float = 1e-12) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L^T = A`` for symmetric PSD ``A``.

    Zero pivots (up to ``tol`` times the largest diagonal) yield zero
    columns, so degenerate covariances are accepted. Raises ``ValueError``
    if ``A`` is not PSD.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    scale = max(np.max(np.abs(np.diag(A))) if n else 0.0, 1.0)
    L = np.zeros_like(A)
    for j in range(n):
        piv = A[j, j] - L[j, :j] @ L[j, :j]
        if piv < -tol * scale:
            raise ValueError("matrix is not positive semi-definite")
        if piv <= tol * scale:
            rest = A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]
            if np.any(np.abs(rest) > np.sqrt(tol) * scale):
                raise ValueError("matrix is not positive semi-definite")
            continue
        L[j, j] = np.sqrt(piv)
        L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L
