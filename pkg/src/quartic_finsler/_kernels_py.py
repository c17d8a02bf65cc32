"""Pure numpy kernels; reference implementation and fallback for ``_ckernels``."""
import numpy as np


def aux_batch(M, V):
    """Return ``(Q, N, K)`` for each row of ``V`` given a dense symmetric ``M``."""
    M = np.ascontiguousarray(M, dtype=np.float64)
    V = np.ascontiguousarray(V, dtype=np.float64)
    K = np.einsum("ijkl,bk,bl->bij", M, V, V)
    N = np.einsum("bij,bj->bi", K, V)
    Q = np.einsum("bi,bi->b", N, V)
    return Q, N, K


def metric_batch(Q, N, K, sign):
    """``f = sign * (3 Q K - 2 N N^T) / |Q|^(3/2)``; rows with ``Q == 0`` are nan."""
    Q = np.asarray(Q, dtype=np.float64)
    absq = np.abs(Q)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(absq > 0, np.asarray(sign, dtype=np.float64) / absq**1.5, np.nan)
    F = 3.0 * Q[:, None, None] * K - 2.0 * N[:, :, None] * N[:, None, :]
    return F * scale[:, None, None]
