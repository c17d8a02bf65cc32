"""Finsler metric, determinant, signature and Cartan tensor at a direction.

With ``Q`` the quartic, ``N`` and ``K`` its contractions with ``v``, and
``s`` the branch sign (``sgn Q`` for the signed and restricted branches,
``1`` for the absolute branch), the metric ``f = (1/2) d^2 L`` is::

    f_mn = s (3 Q K_mn - 2 N_m N_n) / |Q|^(3/2)

It is zero-homogeneous in ``v`` and undefined on the null cone ``Q = 0``.
Its determinant reduces to ``3^(n-1) det K / |Q|^(n/2)``, because
``N^T adj(K) N = Q det K``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .lagrangian import (
    DEFAULT_TOL,
    Branch,
    LagrangianSpec,
    lagrangian_value,
    null_threshold,
)
from .quartic import aux, third_contraction


class OriginError(ValueError):
    """The direction is the zero vector."""


class UndefinedMetricError(ValueError):
    """The metric does not exist at the requested direction."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class SingularInputError(ValueError):
    """A closed-form expression was evaluated on its singular set."""


REASON_NULL = "null-direction"
REASON_DOMAIN = "outside-restricted-domain"


def signature_counts(f: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[int, int, int]:
    """``(n_pos, n_neg, n_zero)`` of a symmetric matrix.

    Eigenvalues below ``tol * max|lambda|`` in magnitude count as zero.
    """
    lam = np.linalg.eigvalsh(f)
    cut = tol * np.max(np.abs(lam))
    return int(np.sum(lam > cut)), int(np.sum(lam < -cut)), int(np.sum(np.abs(lam) <= cut))


@dataclass(frozen=True, eq=False)
class MetricSample:
    v: np.ndarray
    f: np.ndarray
    det: float
    signature: tuple[int, int, int] | None
    defined: bool
    reason: str | None = None

    def to_json(self) -> dict:
        return {
            "v": [float(x) for x in self.v],
            "f": [float(x) for x in self.f.ravel()] if self.defined else None,
            "det": float(self.det) if self.defined else None,
            "signature": list(self.signature) if self.signature else None,
            "defined": self.defined,
            "reason": self.reason,
        }


@dataclass(frozen=True, eq=False)
class CartanSample:
    v: np.ndarray
    C: np.ndarray


def _branch_sign(branch: Branch, q: float) -> float:
    return 1.0 if branch is Branch.ABSOLUTE else math.copysign(1.0, q)


def _check_direction(spec: LagrangianSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (spec.dim,):
        raise ValueError(f"expected a {spec.dim}-vector, got shape {v.shape}")
    if not np.any(v):
        raise OriginError("the metric is not defined at the origin")
    return v


def _undefined_reason(spec, q, v, tol):
    if abs(q) <= null_threshold(spec, v, tol):
        return REASON_NULL
    if spec.branch is Branch.RESTRICTED and q < 0:
        return REASON_DOMAIN
    return None


def _det_from_k(det_k, q, n: int):
    # det(3QK - 2NN^T) = (3Q)^n det K / 3 by the rank-one update lemma (N = Kv,
    # N.v = Q); the branch signs cancel because n is even.  LU on K avoids the
    # cancellation of factorising f itself, which is nearly rank one near Q = 0.
    return 3.0 ** (n - 1) * det_k / np.abs(q) ** (n / 2)


def metric_at(spec: LagrangianSpec, v, tol: float = DEFAULT_TOL) -> MetricSample:
    """Closed-form Finsler metric at ``v``.

    Null directions (and ``Q < 0`` under the restricted branch) give a sample
    with ``defined=False`` and a reason code instead of raising.  The
    determinant is ``3^(n-1) det K / |Q|^(n/2)``, which stays accurate near the
    null cone where ``f`` is close to rank one.
    """
    v = _check_direction(spec, v)
    a = aux(spec.quartic, v)
    reason = _undefined_reason(spec, a.Q, v, tol)
    n = spec.dim
    if reason is not None:
        return MetricSample(v, np.full((n, n), np.nan), math.nan, None, False, reason)
    s = _branch_sign(spec.branch, a.Q)
    f = s * (3.0 * a.Q * a.K - 2.0 * np.outer(a.N, a.N)) / abs(a.Q) ** 1.5
    f = 0.5 * (f + f.T)
    return MetricSample(v, f, float(_det_from_k(np.linalg.det(a.K), a.Q, n)), signature_counts(f, tol), True)


@dataclass(frozen=True, eq=False)
class MetricBatch:
    """Metrics for many directions at once (rows of ``V``)."""

    V: np.ndarray
    Q: np.ndarray
    f: np.ndarray
    det: np.ndarray
    signature: np.ndarray  # (m, 3); -1 where undefined
    defined: np.ndarray
    detK: np.ndarray


def metric_batch(spec: LagrangianSpec, V, tol: float = DEFAULT_TOL) -> MetricBatch:
    """Vectorised :func:`metric_at` backed by :mod:`quartic_finsler.kernels`."""
    V = np.ascontiguousarray(np.atleast_2d(V), dtype=float)
    Q, N, K = kernels.aux_batch(spec.quartic.dense, V)
    thresh = tol * np.einsum("bi,bi->b", V, V) ** 2 * spec.quartic.max_abs
    defined = np.abs(Q) > thresh
    if spec.branch is Branch.RESTRICTED:
        defined &= Q > 0
    sign = np.ones_like(Q) if spec.branch is Branch.ABSOLUTE else np.sign(Q)
    F = kernels.metric_batch(Q, N, K, sign)
    F[~defined] = np.nan
    F = 0.5 * (F + np.swapaxes(F, 1, 2))
    m, n = V.shape[0], spec.dim
    det = np.full(m, np.nan)
    sig = np.full((m, 3), -1, dtype=int)
    if np.any(defined):
        Fd = F[defined]
        det[defined] = _det_from_k(np.linalg.det(K[defined]), Q[defined], n)
        lam = np.linalg.eigvalsh(Fd)
        cut = tol * np.max(np.abs(lam), axis=1, keepdims=True)
        sig[defined] = np.stack(
            [np.sum(lam > cut, 1), np.sum(lam < -cut, 1), np.sum(np.abs(lam) <= cut, 1)], 1
        )
    return MetricBatch(V, Q, F, det, sig, defined, np.linalg.det(K))


def norm_wrt(spec: LagrangianSpec, v, u, tol: float = DEFAULT_TOL) -> float:
    """Squared norm of ``u`` with respect to the direction ``v``: ``f_ij(v) u^i u^j``."""
    ms = metric_at(spec, v, tol)
    if not ms.defined:
        raise UndefinedMetricError(ms.reason)
    u = np.asarray(u, dtype=float)
    return float(u @ ms.f @ u)


def _sym3(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    # A_ij b_k + A_ik b_j + A_jk b_i
    return (np.einsum("ij,k->ijk", A, b) + np.einsum("ik,j->ijk", A, b)
            + np.einsum("jk,i->ijk", A, b))


def cartan_at(spec: LagrangianSpec, v, tol: float = DEFAULT_TOL) -> CartanSample:
    """Cartan tensor ``C_ijk = (1/4) d^3 L / dv^i dv^j dv^k``.

    Uses ``Q = s L^2`` differentiated three times, which keeps the exact
    cancellation for squares of quadrics well conditioned.
    """
    ms = metric_at(spec, v, tol)
    if not ms.defined:
        raise UndefinedMetricError(ms.reason)
    # C is homogeneous of degree -1; work on the unit direction and rescale
    scale = float(np.linalg.norm(ms.v))
    v = ms.v / scale
    a = aux(spec.quartic, v)
    L = math.sqrt(abs(a.Q))
    # derivatives of Q
    Q1, Q2, Q3 = 4.0 * a.N, 12.0 * a.K, 24.0 * third_contraction(spec.quartic, v)
    # derivatives of the unsigned root R = sqrt(|Q|); L = sgn * R on the signed branch
    sq = math.copysign(1.0, a.Q)
    R1 = sq * Q1 / (2 * L)
    R2 = (sq * Q2 / 2 - np.outer(R1, R1)) / L
    R3 = (sq * Q3 / 2 - _sym3(R2, R1)) / L
    lag_sign = 1.0 if spec.branch is Branch.ABSOLUTE else sq
    C = 0.25 * lag_sign * R3 / scale
    return CartanSample(ms.v, C)


def fd_oracle(spec: LagrangianSpec, v, h: float = 1e-4) -> np.ndarray:
    """Finite-difference metric: central second differences of ``L``, step ``h |v|``.

    Verification oracle only; needs ``v`` well away from the null cone.
    """
    v = np.asarray(v, dtype=float)
    n = v.size
    step = h * float(np.linalg.norm(v))
    L = lambda w: lagrangian_value(spec, w)  # noqa: E731
    H = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = step
            ej[j] = step
            val = (L(v + ei + ej) - L(v + ei - ej) - L(v - ei + ej) + L(v - ei - ej)) / (4 * step**2)
            H[i, j] = H[j, i] = val
    return 0.5 * H


def fd_third(spec: LagrangianSpec, v, h: float = 1e-3) -> np.ndarray:
    """Third central differences of ``L``; oracle for ``4 * cartan_at``."""
    v = np.asarray(v, dtype=float)
    n = v.size
    step = h * float(np.linalg.norm(v))
    eye = np.eye(n) * step
    T = np.empty((n, n, n))
    for i, j, k in itertools.product(range(n), repeat=3):
        acc = 0.0
        for si, sj, sk in itertools.product((1, -1), repeat=3):
            acc += si * sj * sk * lagrangian_value(spec, v + si * eye[i] + sj * eye[j] + sk * eye[k])
        T[i, j, k] = acc / (8 * step**3)
    return T


# -- closed-form determinants of the two-dimensional catalog -----------------------

CLOSED_FORM_FAMILIES = ("power_sum", "power_diff", "ee", "el", "ll")
_SINGULAR_RTOL = 1e-12


def closed_form_det_array(family: str, k, alpha, beta):
    """Vectorised determinant formulas; returns ``(det, singular_mask)``.

    ``power_sum``  ``3 a^2 b^2 / (a^4 + b^4)``
    ``power_diff`` ``-3 a^2 b^2 / |a^4 - b^4|``
    ``ee``  ``[2(1+k) a^4 - (k^2-10k+1) a^2 b^2 + 2k(k+1) b^4] / [4 (a^2+b^2)(a^2+k b^2)]``
    ``el``  ``[2(1-k) a^4 - (k^2+10k+1) a^2 b^2 - 2k(1-k) b^4] / [4 (a^2+b^2)|a^2-k b^2|]``
    ``ll``  ``-[2(k+1) a^4 + (k^2-10k+1) a^2 b^2 + 2k(k+1) b^4] / [4 |(a^2-b^2)(a^2-k b^2)|]``
    """
    a2 = np.asarray(alpha, dtype=float) ** 2
    b2 = np.asarray(beta, dtype=float) ** 2
    k = np.asarray(1.0 if k is None else k, dtype=float)
    r2 = a2 + b2
    if family == "power_sum":
        num, den = 3 * a2 * b2, a2**2 + b2**2
        singular = r2 == 0
    elif family == "power_diff":
        num, den = -3 * a2 * b2, np.abs(a2**2 - b2**2)
        singular = np.abs(a2 - b2) <= _SINGULAR_RTOL * r2
    elif family == "ee":
        num = 2 * (1 + k) * a2**2 - (k**2 - 10 * k + 1) * a2 * b2 + 2 * k * (k + 1) * b2**2
        den = 4 * r2 * (a2 + k * b2)
        singular = r2 == 0
    elif family == "el":
        num = 2 * (1 - k) * a2**2 - (k**2 + 10 * k + 1) * a2 * b2 - 2 * k * (1 - k) * b2**2
        den = 4 * r2 * np.abs(a2 - k * b2)
        singular = np.abs(a2 - k * b2) <= _SINGULAR_RTOL * (a2 + k * b2)
    elif family == "ll":
        num = -(2 * (k + 1) * a2**2 + (k**2 - 10 * k + 1) * a2 * b2 + 2 * k * (k + 1) * b2**2)
        den = 4 * np.abs((a2 - b2) * (a2 - k * b2))
        singular = ((np.abs(a2 - b2) <= _SINGULAR_RTOL * r2)
                    | (np.abs(a2 - k * b2) <= _SINGULAR_RTOL * (a2 + k * b2)))
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {CLOSED_FORM_FAMILIES}")
    singular = np.broadcast_to(singular | (r2 == 0), np.broadcast(num, den).shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        det = np.where(singular, np.nan, num / den)
    return det, singular


def determinant_closed_form(family: str, v, k: float | None = None) -> float:
    """Determinant of the Finsler metric in closed form for the two-dimensional catalog families."""
    a, b = (float(x) for x in v)
    if family in ("ee", "el", "ll") and k is None:
        raise ValueError(f"family {family!r} needs a parameter k")
    det, singular = closed_form_det_array(family, k, a, b)
    if bool(singular):
        raise SingularInputError(f"{family}: v={tuple(v)} lies on the singular set")
    return float(det)
