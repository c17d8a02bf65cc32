"""Finsler functions and Lagrangians built from a quartic.

Three branch conventions turn ``Q`` into a second-order homogeneous
Lagrangian ``L`` and a first-order Finsler function ``F``:

``RESTRICTED``  ``L = sqrt(Q)``, defined only where ``Q >= 0``
``ABSOLUTE``    ``L = sqrt(|Q|)``
``SIGNED``      ``L = sgn(Q) sqrt(|Q|)`` (default; keeps the sign of ``Q``)

Undefined values are returned as ``nan``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .quartic import SymQuartic

DEFAULT_TOL = 1e-9


class Branch(enum.Enum):
    RESTRICTED = "restricted"
    ABSOLUTE = "abs"
    SIGNED = "signed"

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, cls):
            return value
        aliases = {"restrictedroot": "restricted", "absolutevalue": "abs",
                   "absolute": "abs", "signedabsolute": "signed"}
        key = str(value).lower()
        return cls(aliases.get(key, key))


class SignClass(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    NULL = "null"


@dataclass(frozen=True)
class LagrangianSpec:
    quartic: SymQuartic
    branch: Branch = Branch.SIGNED

    def __post_init__(self):
        object.__setattr__(self, "branch", Branch.parse(self.branch))

    @property
    def dim(self) -> int:
        return self.quartic.dim

    def with_branch(self, branch) -> "LagrangianSpec":
        return LagrangianSpec(self.quartic, Branch.parse(branch))


def _lagrangian_from_q(q, branch: Branch):
    q = np.asarray(q, dtype=float)
    root = np.sqrt(np.abs(q))
    if branch is Branch.SIGNED:
        return np.sign(q) * root
    if branch is Branch.ABSOLUTE:
        return root
    return np.where(q >= 0, root, np.nan)


def _finsler_from_q(q, branch: Branch):
    q = np.asarray(q, dtype=float)
    root = np.abs(q) ** 0.25
    if branch is Branch.SIGNED:
        return np.sign(q) * root
    if branch is Branch.ABSOLUTE:
        return root
    return np.where(q >= 0, root, np.nan)


def lagrangian_value(spec: LagrangianSpec, v) -> float:
    """``L(v)``; ``nan`` outside the domain of the restricted branch."""
    return float(_lagrangian_from_q(spec.quartic.eval(v), spec.branch))


def lagrangian_values(spec: LagrangianSpec, V) -> np.ndarray:
    return _lagrangian_from_q(spec.quartic.eval_many(V), spec.branch)


def finsler_function(spec: LagrangianSpec, v) -> float:
    """``F(v)``, the fourth root of ``Q`` under the chosen branch."""
    return float(_finsler_from_q(spec.quartic.eval(v), spec.branch))


def finsler_values(spec: LagrangianSpec, V) -> np.ndarray:
    return _finsler_from_q(spec.quartic.eval_many(V), spec.branch)


def null_threshold(spec: LagrangianSpec, v, tol: float = DEFAULT_TOL) -> float:
    """Scale for deciding ``Q(v) == 0``: ``tol * |v|^4 * max|M|``."""
    return tol * float(np.dot(v, v)) ** 2 * spec.quartic.max_abs


def sign_class(spec: LagrangianSpec, v, tol: float = DEFAULT_TOL) -> SignClass:
    """Spacelike / timelike / null according to the sign of ``L(v)``.

    For the signed and restricted branches this is the sign of ``Q``; the
    absolute branch has no timelike directions.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.asarray(v, dtype=float)
    q = spec.quartic.eval(v)
    if abs(q) <= null_threshold(spec, v, tol):
        return SignClass.NULL
    if q > 0 or spec.branch is Branch.ABSOLUTE:
        return SignClass.SPACELIKE
    return SignClass.TIMELIKE


def sign_classes(spec: LagrangianSpec, V, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vectorised :func:`sign_class`; returns an object array of ``SignClass``."""
    V = np.asarray(V, dtype=float)
    q = spec.quartic.eval_many(V)
    thresh = tol * np.einsum("bi,bi->b", V, V) ** 2 * spec.quartic.max_abs
    out = np.full(q.shape, SignClass.SPACELIKE, dtype=object)
    if spec.branch is not Branch.ABSOLUTE:
        out[q < 0] = SignClass.TIMELIKE
    out[np.abs(q) <= thresh] = SignClass.NULL
    return out


AXIOMS = ("F1", "F2", "F3", "F4", "F5", "F6")


@dataclass
class AxiomReport:
    """Per-axiom violations over a sample of directions.

    ``violations[axiom]`` holds the indices (into ``sample``) of the
    directions where the axiom fails.
    """

    sample: np.ndarray
    violations: dict = field(default_factory=dict)

    def passed(self, axiom: str) -> bool:
        return len(self.violations[axiom]) == 0

    def violating(self, axiom: str) -> np.ndarray:
        return self.sample[self.violations[axiom]]

    @property
    def all_passed(self) -> bool:
        return all(self.passed(a) for a in AXIOMS)

    def summary(self) -> dict:
        return {a: {"passed": self.passed(a), "violations": len(self.violations[a])}
                for a in AXIOMS}


def _fd_gradient(spec, v, h):
    n = v.size
    g = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        g[i] = (lagrangian_value(spec, v + e) - lagrangian_value(spec, v - e)) / (2 * h)
    return g


def axiom_audit(spec: LagrangianSpec, sample, tol: float = DEFAULT_TOL,
                smooth_rtol: float = 1e-4) -> AxiomReport:
    """Check the classical Finsler axioms on a sample of nonzero directions.

    F1 finite ``F``; F2 ``F > 0``; F3 ``F(lv) = l F(v)`` for ``l`` in
    {0.5, 2, 7}; F4 the finite-difference gradient of ``L`` is stable under
    step halving; F5 the metric exists and is nondegenerate; F6 the metric
    is positive definite.
    """
    from .metric import metric_at  # metric depends on this module

    sample = np.atleast_2d(np.asarray(sample, dtype=float))
    if sample.shape[0] == 0:
        raise ValueError("sample must be non-empty")
    norms = np.linalg.norm(sample, axis=1)
    if np.any(norms == 0):
        raise ValueError("sample must exclude the origin")

    bad = {a: [] for a in AXIOMS}
    n = spec.dim
    for idx, v in enumerate(sample):
        F = finsler_function(spec, v)
        if not math.isfinite(F):
            bad["F1"].append(idx)
        if not F > 0:
            bad["F2"].append(idx)
        for lam in (0.5, 2.0, 7.0):
            Fl = finsler_function(spec, lam * v)
            if not (math.isfinite(Fl) and math.isfinite(F)
                    and abs(Fl - lam * F) <= 1e-12 * max(abs(lam * F), 1e-300)):
                bad["F3"].append(idx)
                break
        h = 1e-4 * norms[idx]
        g1, g2 = _fd_gradient(spec, v, h), _fd_gradient(spec, v, h / 2)
        scale = max(np.max(np.abs(g2)), 1e-300)
        if not (np.all(np.isfinite(g1)) and np.all(np.isfinite(g2))
                and np.max(np.abs(g1 - g2)) <= smooth_rtol * scale):
            bad["F4"].append(idx)
        ms = metric_at(spec, v, tol)
        if not ms.defined or ms.signature[2] > 0:
            bad["F5"].append(idx)
        if not ms.defined or ms.signature != (n, 0, 0):
            bad["F6"].append(idx)
    return AxiomReport(sample, {a: np.array(b, dtype=int) for a, b in bad.items()})
