"""Fully symmetric quartic forms and symmetric quadrics.

A :class:`SymQuartic` stores one coefficient per multiset ``{i, j, k, l}``
(5 values for ``dim=2``, 35 for ``dim=4``), so full index symmetry holds by
construction.  The stored value is the tensor component ``M_ijkl``; the
dense ``(n, n, n, n)`` array is expanded lazily.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

SUPPORTED_DIMS = (2, 4)

_PERMS4 = tuple(itertools.permutations(range(4)))


class QuarticError(ValueError):
    pass


class UnsupportedDimensionError(QuarticError):
    pass


def _check_dim(dim: int) -> int:
    if dim not in SUPPORTED_DIMS:
        raise UnsupportedDimensionError(f"dimension {dim} not in {SUPPORTED_DIMS}")
    return dim


@dataclass(frozen=True)
class _MultisetIndex:
    dim: int
    keys: tuple[tuple[int, int, int, int], ...]
    multiplicity: np.ndarray  # number of distinct orderings of each multiset
    exponents: np.ndarray  # (n_keys, dim) monomial exponents
    position: dict = field(repr=False)


_INDEX_CACHE: dict[int, _MultisetIndex] = {}


def multiset_index(dim: int) -> _MultisetIndex:
    """Canonical multiset ordering for ``dim`` (cached)."""
    if dim not in _INDEX_CACHE:
        keys = tuple(itertools.combinations_with_replacement(range(dim), 4))
        mult = np.empty(len(keys))
        expo = np.zeros((len(keys), dim), dtype=np.int64)
        for r, key in enumerate(keys):
            counts = np.bincount(key, minlength=dim)
            expo[r] = counts
            mult[r] = math.factorial(4) / np.prod([math.factorial(c) for c in counts])
        mult.setflags(write=False)
        expo.setflags(write=False)
        _INDEX_CACHE[dim] = _MultisetIndex(
            dim, keys, mult, expo, {key: r for r, key in enumerate(keys)}
        )
    return _INDEX_CACHE[dim]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SymQuadric:
    """Symmetric bilinear form ``g_ij`` on an ``dim``-dimensional space."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _readonly(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise QuarticError(f"quadric must be square, got shape {m.shape}")
        if not np.array_equal(m, m.T):
            raise QuarticError("quadric matrix is not symmetric")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def diag(cls, *entries: float) -> "SymQuadric":
        return cls(np.diag(np.asarray(entries, dtype=float)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(v @ self.matrix @ v)


@dataclass(frozen=True, eq=False)
class QuarticAux:
    """Contractions of a quartic with a direction ``v``.

    ``N_m = M_mijk v^i v^j v^k``, ``K_mn = M_mnij v^i v^j`` and ``Q = N_m v^m``.
    The gradient of ``Q`` is ``4 N`` and its Hessian ``12 K``.
    """

    v: np.ndarray
    N: np.ndarray
    K: np.ndarray
    Q: float


@dataclass(frozen=True, eq=False)
class SymQuartic:
    """Fully symmetric rank-4 tensor ``M_ijkl`` stored by multiset."""

    dim: int
    coeffs: np.ndarray

    def __post_init__(self):
        _check_dim(self.dim)
        c = _readonly(self.coeffs).ravel()
        expected = len(multiset_index(self.dim).keys)
        if c.shape != (expected,):
            raise QuarticError(
                f"dim={self.dim} needs {expected} multiset coefficients, got {c.size}"
            )
        object.__setattr__(self, "coeffs", c)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_components(cls, dim: int, comps: dict) -> "SymQuartic":
        """Build from ``{(i, j, k, l): value}``; keys are sorted into multisets."""
        idx = multiset_index(_check_dim(dim))
        c = np.zeros(len(idx.keys))
        for key, val in comps.items():
            c[idx.position[tuple(sorted(key))]] = val
        return cls(dim, c)

    @classmethod
    def zeros(cls, dim: int) -> "SymQuartic":
        return cls(dim, np.zeros(len(multiset_index(_check_dim(dim)).keys)))

    # -- views --------------------------------------------------------------
    @cached_property
    def dense(self) -> np.ndarray:
        n = self.dim
        out = np.empty((n, n, n, n))
        pos = multiset_index(n).position
        for ijkl in itertools.product(range(n), repeat=4):
            out[ijkl] = self.coeffs[pos[tuple(sorted(ijkl))]]
        out.setflags(write=False)
        return out

    def __getitem__(self, ijkl) -> float:
        return float(self.coeffs[multiset_index(self.dim).position[tuple(sorted(ijkl))]])

    @property
    def max_abs(self) -> float:
        """Max-norm of the components, used to scale null tolerances."""
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def __mul__(self, scalar: float) -> "SymQuartic":
        return SymQuartic(self.dim, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __add__(self, other: "SymQuartic") -> "SymQuartic":
        if other.dim != self.dim:
            raise QuarticError("dimension mismatch")
        return SymQuartic(self.dim, self.coeffs + other.coeffs)

    def allclose(self, other: "SymQuartic", rtol=1e-12, atol=1e-14) -> bool:
        return self.dim == other.dim and np.allclose(self.coeffs, other.coeffs, rtol, atol)

    # -- evaluation ---------------------------------------------------------
    def eval(self, v) -> float:
        return eval_quartic(self, v)

    __call__ = eval

    def eval_many(self, V) -> np.ndarray:
        """Evaluate on each row of ``V`` (shape ``(m, dim)``)."""
        V = np.asarray(V, dtype=float)
        idx = multiset_index(self.dim)
        mono = np.prod(V[:, None, :] ** idx.exponents[None, :, :], axis=2)
        return mono @ (idx.multiplicity * self.coeffs)

    def aux(self, v) -> QuarticAux:
        return aux(self, v)

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        keys = multiset_index(self.dim).keys
        return {
            "dim": self.dim,
            "kind": "multiset",
            "coeffs": [[list(k), float(c)] for k, c in zip(keys, self.coeffs)],
        }


def _as_vector(v, dim: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (dim,):
        raise QuarticError(f"expected a {dim}-vector, got shape {v.shape}")
    return v


def eval_quartic(M: SymQuartic, v) -> float:
    """``Q(v) = M_ijkl v^i v^j v^k v^l``."""
    v = _as_vector(v, M.dim)
    return float(M.eval_many(v[None, :])[0])


def aux(M: SymQuartic, v) -> QuarticAux:
    v = _as_vector(v, M.dim)
    K = np.einsum("ijkl,k,l->ij", M.dense, v, v)
    K = 0.5 * (K + K.T)
    N = K @ v
    Q = float(N @ v)
    return QuarticAux(v=v, N=N, K=K, Q=Q)


def third_contraction(M: SymQuartic, v) -> np.ndarray:
    """``P_ijk = M_ijkl v^l``; the third derivative of ``Q`` is ``24 P``."""
    return np.einsum("ijkl,l->ijk", M.dense, _as_vector(v, M.dim))


def _permutation_average(dense: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(dense)
    for p in _PERMS4:
        acc += np.transpose(dense, p)
    return acc / 24.0


def symmetrize4(dense) -> SymQuartic:
    """Project a rank-4 array onto fully symmetric tensors (mean of 24 permutations)."""
    dense = np.asarray(dense, dtype=float)
    if dense.ndim != 4 or len(set(dense.shape)) != 1:
        raise QuarticError(f"expected an n^4 array, got shape {dense.shape}")
    n = _check_dim(dense.shape[0])
    # already-symmetric input is taken verbatim so the projection is exactly idempotent
    if not all(np.array_equal(dense, np.transpose(dense, p)) for p in _PERMS4[1:]):
        dense = _permutation_average(dense)
    keys = multiset_index(n).keys
    return SymQuartic(n, np.array([dense[k] for k in keys]))


def from_quadric_square(g: SymQuadric) -> SymQuartic:
    """``M = g_(ij g_kl)`` so that ``Q(v) = (g(v, v))**2``."""
    return symmetrize4(np.einsum("ij,kl->ijkl", g.matrix, g.matrix))


def from_quadric_product(g: SymQuadric, h: SymQuadric) -> SymQuartic:
    """``M = g_(ij h_kl)`` so that ``Q(v) = g(v, v) h(v, v)``."""
    if g.dim != h.dim:
        raise QuarticError(f"dimension mismatch: {g.dim} vs {h.dim}")
    return symmetrize4(np.einsum("ij,kl->ijkl", g.matrix, h.matrix))


def from_diagonal_powers(weights) -> SymQuartic:
    """``Q(v) = sum_i w_i (v^i)**4``."""
    w = np.asarray(weights, dtype=float).ravel()
    return SymQuartic.from_components(w.size, {(i, i, i, i): w[i] for i in range(w.size)})


# -- JSON literals --------------------------------------------------------------

def quartic_from_json(doc: dict[str, Any]) -> SymQuartic:
    """Build a quartic from a JSON literal.

    Recognised kinds::

        {"dim": n, "kind": "dense", "coeffs": <n^4 nested list>}
        {"dim": n, "kind": "square", "g": <n x n>}
        {"dim": n, "kind": "product", "g": <n x n>, "h": <n x n>}
        {"dim": n, "kind": "diag_powers", "weights": <n-list>}
        {"dim": n, "kind": "multiset", "coeffs": [[[i, j, k, l], value], ...]}

    ``multiset`` is what :meth:`SymQuartic.to_json` writes; loading it is exact.
    """
    try:
        dim = int(doc["dim"])
        kind = doc["kind"]
    except (KeyError, TypeError) as exc:
        raise QuarticError(f"quartic literal needs 'dim' and 'kind': {exc}") from None
    _check_dim(dim)
    if kind == "dense":
        M = symmetrize4(doc["coeffs"])
    elif kind == "square":
        M = from_quadric_square(SymQuadric(doc["g"]))
    elif kind == "product":
        M = from_quadric_product(SymQuadric(doc["g"]), SymQuadric(doc["h"]))
    elif kind == "diag_powers":
        M = from_diagonal_powers(doc["weights"])
    elif kind == "multiset":
        M = SymQuartic.from_components(dim, {tuple(k): v for k, v in doc["coeffs"]})
    else:
        raise QuarticError(f"unknown quartic kind {kind!r}")
    if M.dim != dim:
        raise QuarticError(f"declared dim {dim} but payload has dim {M.dim}")
    return M


def load_quartic(path) -> SymQuartic:
    return quartic_from_json(json.loads(Path(path).read_text()))


def save_quartic(M: SymQuartic, path) -> None:
    Path(path).write_text(json.dumps(M.to_json(), indent=1) + "\n")
