"""Partition of the tangent space into the characteristic sets A to H.

Set letters used throughout::

    A  spacelike  (L > 0)            E  metric degenerate
    B  timelike   (L < 0)            F  metric of Euclidean signature
    C  null       (L = 0, v != 0)    G  metric of Lorentzian signature
    D  L not differentiable          H  mixed signature (n >= 4 only)

For quartic Lagrangians ``D`` coincides with ``C``; that is the default.
Boundaries on the circle are localised by bisection where the boundary
function changes sign and by bounded minimisation of its absolute value
where it only touches zero (double roots such as the axes of ``a^4 + b^4``).
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.stats import norm, qmc

from .kernels import max_workers
from .lagrangian import (
    DEFAULT_TOL,
    LagrangianSpec,
    SignClass,
    lagrangian_values,
    sign_class,
    sign_classes,
)
from .metric import OriginError, closed_form_det_array, metric_at, metric_batch

SET_LETTERS = "ABCDEFGH"
BISECT_MAX_ITER = 60
TOUCH_TOL = 1e-10


class MetricState(enum.Enum):
    DEGENERATE = "degenerate"
    EUCLIDEAN = "euclidean"
    LORENTZIAN = "lorentzian"
    MIXED = "mixed"
    UNDEFINED = "undefined"

    @property
    def letter(self) -> str | None:
        return {"degenerate": "E", "euclidean": "F", "lorentzian": "G", "mixed": "H"}.get(self.value)


def metric_state_from_signature(sig, n: int) -> MetricState:
    if sig is None or sig[0] < 0:
        return MetricState.UNDEFINED
    pos, neg, zero = (int(x) for x in sig)
    if zero > 0:
        return MetricState.DEGENERATE
    if pos == n or neg == n:
        return MetricState.EUCLIDEAN
    if (pos, neg) in ((n - 1, 1), (1, n - 1)):
        return MetricState.LORENTZIAN
    return MetricState.MIXED


@dataclass(frozen=True)
class SetLabel:
    sign: SignClass
    differentiable: bool
    metric_state: MetricState

    @property
    def sets(self) -> tuple[str, ...]:
        out = [{"spacelike": "A", "timelike": "B", "null": "C"}[self.sign.value]]
        if not self.differentiable:
            out.append("D")
        if self.metric_state.letter:
            out.append(self.metric_state.letter)
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "sign": self.sign.value,
            "differentiable": self.differentiable,
            "metric": self.metric_state.value,
            "sets": list(self.sets),
        }


def classify_direction(spec: LagrangianSpec, v, tol: float = DEFAULT_TOL) -> SetLabel:
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise OriginError("cannot classify the origin")
    sign = sign_class(spec, v, tol)
    ms = metric_at(spec, v, tol)
    state = metric_state_from_signature(ms.signature, spec.dim) if ms.defined else MetricState.UNDEFINED
    return SetLabel(sign, sign is not SignClass.NULL and ms.defined, state)


def classify_many(spec: LagrangianSpec, V, tol: float = DEFAULT_TOL):
    """Labels for each row of ``V``; returns ``(labels, MetricBatch)``."""
    batch = metric_batch(spec, V, tol)
    signs = sign_classes(spec, V, tol)
    labels = []
    for s, d, sig in zip(signs, batch.defined, batch.signature):
        state = metric_state_from_signature(sig, spec.dim) if d else MetricState.UNDEFINED
        labels.append(SetLabel(s, bool(d) and s is not SignClass.NULL, state))
    return labels, batch


# -- one-dimensional root localisation -------------------------------------------

@dataclass(frozen=True)
class Boundary:
    """A localised boundary direction.  ``kind`` is ``"C"`` or ``"E"``."""

    angle: float
    kind: str
    width: float
    residual: float

    @property
    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])


def bisect_sign_change(g, a: float, b: float, ga: float, max_iter: int = BISECT_MAX_ITER):
    """Bisection on ``[a, b]`` with ``g(a) = ga`` of opposite sign to ``g(b)``.

    Returns ``(root, bracket_width)``.
    """
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if not a < m < b:
            break
        gm = g(m)
        if gm == 0.0:
            return m, 0.0
        if (gm < 0) == (ga < 0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b), b - a


def _refine_touch(g, a: float, b: float):
    res = optimize.minimize_scalar(lambda t: abs(g(t)), bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-12})
    return float(res.x), abs(float(res.fun))


def locate_zeros(g, grid: np.ndarray, values: np.ndarray, period: float | None = None,
                 touch_tol: float = TOUCH_TOL):
    """Zeros of a scalar function sampled on an increasing ``grid``.

    Sign changes are bisected; local minima of ``|g|`` without a sign change
    are refined and kept when the minimum is below ``touch_tol``.  With
    ``period`` set, the grid wraps around.  Returns ``(x, width, |g(x)|)`` triples.
    """
    x = np.asarray(grid, dtype=float)
    y = np.asarray(values, dtype=float)
    m = x.size
    last = m if period is not None else m - 1

    def at(j):
        if j >= m:
            return x[j - m] + period, y[j - m]
        if j < 0:
            return x[j + m] - period, y[j + m]
        return x[j], y[j]

    out = []
    for j in range(m):
        if y[j] == 0.0:
            out.append((x[j], 0.0, 0.0))
    for j in range(last):
        (xa, ya), (xb, yb) = at(j), at(j + 1)
        if ya * yb < 0:
            r, w = bisect_sign_change(g, xa, xb, ya)
            out.append((r, w, abs(g(r))))
    lo, hi = (0, m) if period is not None else (1, m - 1)
    for j in range(lo, hi):
        (xp, yp), (xc, yc), (xn, yn) = at(j - 1), at(j), at(j + 1)
        if yc == 0.0 or yp * yc <= 0 or yc * yn <= 0:
            continue
        if abs(yc) <= abs(yp) and abs(yc) <= abs(yn):
            r, val = _refine_touch(g, xp, xn)
            if val <= touch_tol:
                out.append((r, 2e-12, val))
    if period is not None:
        out = [((r % period), w, v) for r, w, v in out]
    out.sort()
    merged = []
    for rec in out:
        if merged and abs(rec[0] - merged[-1][0]) < 1e-7:
            continue
        merged.append(rec)
    if period is not None and len(merged) > 1 and merged[-1][0] - merged[0][0] > period - 1e-7:
        merged.pop()
    return merged


# -- circle scans ------------------------------------------------------------------

def _unit(theta):
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


@dataclass
class ClassificationMap:
    """Sampled labels on the unit circle plus localised boundaries."""

    angles: np.ndarray
    labels: list
    det: np.ndarray
    boundaries: list = field(default_factory=list)
    d_mode: str = "null"

    @property
    def samples(self) -> list:
        return list(zip(self.angles.tolist(), self.labels))

    def boundary_angles(self, kind: str) -> np.ndarray:
        return np.array([b.angle for b in self.boundaries if b.kind == kind])

    def inventory(self) -> dict[str, bool]:
        """Which of the sets A to H are nonempty (excluding the origin)."""
        found = {c: False for c in SET_LETTERS}
        for lab in self.labels:
            for c in lab.sets:
                found[c] = True
        for b in self.boundaries:
            found[b.kind] = True
            if b.kind == "C":
                found["D"] = True
        return found

    columns = ("angle", "det", "label", "sets")

    def rows(self):
        for a, lab, d in zip(self.angles, self.labels, self.det):
            yield a, d, lab.metric_state.value, "".join(lab.sets)

    def to_json(self) -> dict:
        return {
            "samples": [{"angle": float(a), "det": None if not np.isfinite(d) else float(d),
                         **lab.to_json()} for a, lab, d in zip(self.angles, self.labels, self.det)],
            "boundaries": [{"angle": b.angle, "kind": b.kind, "width": b.width,
                            "residual": b.residual} for b in self.boundaries],
            "inventory": self.inventory(),
        }


def _numeric_nondiff(spec, U, rtol=1e-4):
    from .lagrangian import lagrangian_value

    bad = np.zeros(len(U), dtype=bool)
    for idx, v in enumerate(U):
        grads = []
        for h in (1e-5, 5e-6):
            g = []
            for i in range(v.size):
                e = np.zeros(v.size)
                e[i] = h
                g.append((lagrangian_value(spec, v + e) - lagrangian_value(spec, v - e)) / (2 * h))
            grads.append(np.array(g))
        scale = max(np.max(np.abs(grads[1])), 1e-300)
        bad[idx] = not (np.all(np.isfinite(grads)) and np.max(np.abs(grads[0] - grads[1])) <= rtol * scale)
    return bad


def scan_circle(spec: LagrangianSpec, resolution: int = 360, tol: float = DEFAULT_TOL,
                d_mode: str = "null") -> ClassificationMap:
    """Classify ``resolution`` equally spaced directions and localise boundaries.

    ``C`` boundaries are zeros of ``Q(u)``; ``E`` boundaries are zeros of
    ``det K(u)`` (the metric determinant is ``3 det K / |Q|`` in 2D) that do
    not sit on ``C``.  ``d_mode="numeric"`` replaces the ``D = C`` rule with
    a finite-difference differentiability test on the samples.
    """
    if spec.dim != 2:
        raise ValueError("scan_circle needs a two-dimensional quartic")
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    M = spec.quartic
    scale = M.max_abs or 1.0
    angles = 2 * np.pi * np.arange(resolution) / resolution
    U = _unit(angles)
    labels, batch = classify_many(spec, U, tol)
    if d_mode == "numeric":
        nd = _numeric_nondiff(spec, U)
        labels = [SetLabel(l.sign, not bad, l.metric_state) for l, bad in zip(labels, nd)]
    elif d_mode != "null":
        raise ValueError(f"unknown d_mode {d_mode!r}")

    def gC(t):
        return M.eval(np.array([math.cos(t), math.sin(t)])) / scale

    dense = M.dense

    def gE(t):
        u = np.array([math.cos(t), math.sin(t)])
        return float(np.linalg.det(np.einsum("ijkl,k,l->ij", dense, u, u))) / scale**2

    period = 2 * np.pi
    boundaries = []
    for r, w, res in locate_zeros(gC, angles, batch.Q / scale, period):
        boundaries.append(Boundary(float(r), "C", float(w), float(res)))
    c_angles = [b.angle for b in boundaries]
    for r, w, res in locate_zeros(gE, angles, batch.detK / scale**2, period):
        if abs(gC(r)) <= tol:
            continue  # the metric is not defined on C
        if spec.branch.value == "restricted" and gC(r) < 0:
            continue
        if any(min(abs(r - c), period - abs(r - c)) < 1e-7 for c in c_angles):
            continue
        boundaries.append(Boundary(float(r), "E", float(w), float(res)))
    boundaries.sort(key=lambda b: (b.angle, b.kind))
    return ClassificationMap(angles, labels, batch.det, boundaries, d_mode)


# -- parameter maps -------------------------------------------------------------

def _family_q(family: str, k, a, b):
    a2, b2 = np.asarray(a, float) ** 2, np.asarray(b, float) ** 2
    k = np.asarray(1.0 if k is None else k, float)
    return {
        "power_sum": lambda: a2**2 + b2**2,
        "power_diff": lambda: a2**2 - b2**2,
        "ee": lambda: (a2 + b2) * (a2 + k * b2),
        "el": lambda: (a2 + b2) * (a2 - k * b2),
        "ll": lambda: (a2 - b2) * (a2 - k * b2),
    }[family]()


@dataclass
class ParameterMap:
    """Sign of the metric determinant over a ``(k, angle)`` grid."""

    family: str
    ks: np.ndarray
    angles: np.ndarray
    det: np.ndarray  # (len(ks), len(angles))
    labels: np.ndarray
    boundaries: list = field(default_factory=list)  # (k, angle, width)

    columns = ("k", "angle", "det", "label")

    def rows(self):
        for i, k in enumerate(self.ks):
            for j, a in enumerate(self.angles):
                yield k, a, self.det[i, j], self.labels[i, j]

    def count(self, label: str) -> int:
        return int(np.sum(self.labels == label))

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "columns": list(self.columns),
            "rows": [[float(k), float(a), None if not np.isfinite(d) else float(d), str(l)]
                     for k, a, d, l in self.rows()],
            "boundaries": [{"k": k, "angle": a, "width": w} for k, a, w in self.boundaries],
        }


def _det_labels(det, singular):
    labels = np.where(det > 0, "euclidean", np.where(det < 0, "lorentzian", "degenerate"))
    return np.where(singular, "singular", labels).astype(object)


def parameter_map(family: str, k_range=(1.0, 50.0), angle_range=(0.0, np.pi / 2),
                  grid=(64, 64)) -> ParameterMap:
    """Closed-form determinant sign on a ``(k, angle)`` grid, ``k``-major.

    The ``det = 0`` curve is traced by bisection in ``k`` along each angle
    column; brackets across a pole of the determinant (where ``Q`` changes
    sign) are skipped.
    """
    nk, na = (grid, grid) if np.isscalar(grid) else grid
    if nk < 16 or na < 16:
        raise ValueError("grid must be at least 16 x 16")
    ks = np.linspace(float(k_range[0]), float(k_range[1]), int(nk))
    angles = np.linspace(float(angle_range[0]), float(angle_range[1]), int(na))
    a, b = np.cos(angles)[None, :], np.sin(angles)[None, :]
    det, singular = closed_form_det_array(family, ks[:, None], a, b)
    labels = _det_labels(det, singular)
    qv = _family_q(family, ks[:, None], a, b)

    boundaries = []
    for j, t in enumerate(angles):
        ca, sb = math.cos(t), math.sin(t)

        def g(k, ca=ca, sb=sb):
            return float(closed_form_det_array(family, k, ca, sb)[0])

        for i in range(nk - 1):
            d0, d1 = det[i, j], det[i + 1, j]
            if not (np.isfinite(d0) and np.isfinite(d1)):
                continue
            if d0 == 0.0:
                boundaries.append((float(ks[i]), float(t), 0.0))
            elif d0 * d1 < 0 and qv[i, j] * qv[i + 1, j] > 0:
                r, w = bisect_sign_change(g, ks[i], ks[i + 1], d0)
                boundaries.append((float(r), float(t), float(w)))
    return ParameterMap(family, ks, angles, det, labels, boundaries)


def min_det_over_angles(family: str, k: float, resolution: int = 2048) -> float:
    """Minimum of the closed-form determinant over directions in the first quadrant."""
    theta = np.linspace(0.0, np.pi / 2, resolution)
    det, singular = closed_form_det_array(family, k, np.cos(theta), np.sin(theta))
    det = np.where(singular, np.inf, det)
    j = int(np.argmin(det))
    lo, hi = theta[max(j - 1, 0)], theta[min(j + 1, resolution - 1)]

    def g(t):
        d, s = closed_form_det_array(family, k, math.cos(t), math.sin(t))
        return math.inf if bool(s) else float(d)

    res = optimize.minimize_scalar(g, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(min(det[j], res.fun))


def signature_change_threshold(family: str = "ee", k_max: int = 1000) -> int | None:
    """Smallest integer ``k >= 1`` for which some direction has ``det f < 0``."""
    for k in range(1, k_max + 1):
        if min_det_over_angles(family, float(k)) < 0:
            return k
    return None


def det_zero_ratios(family: str, k: float, resolution: int = 4096) -> np.ndarray:
    """Values of ``alpha/beta`` in the first quadrant where the determinant vanishes."""
    theta = np.linspace(1e-9, np.pi / 2 - 1e-9, resolution)

    def g(t):
        return float(closed_form_det_array(family, k, math.cos(t), math.sin(t))[0])

    det, singular = closed_form_det_array(family, k, np.cos(theta), np.sin(theta))
    q = _family_q(family, k, np.cos(theta), np.sin(theta))
    roots = []
    for j in range(resolution - 1):
        if singular[j] or singular[j + 1] or q[j] * q[j + 1] <= 0:
            continue
        if det[j] * det[j + 1] < 0:
            r, _ = bisect_sign_change(g, theta[j], theta[j + 1], det[j])
            roots.append(1.0 / math.tan(r))
    return np.sort(np.array(roots))


# -- indicatrices ---------------------------------------------------------------

@dataclass
class IndicatrixArc:
    angles: np.ndarray
    points: np.ndarray
    convexity: str  # "convex", "concave", "mixed" or "flat"


@dataclass
class Indicatrix:
    level: float
    arcs: list
    note: str = ""

    @property
    def points(self) -> np.ndarray:
        if not self.arcs:
            return np.empty((0, 2))
        return np.concatenate([a.points for a in self.arcs])

    @property
    def convexity(self) -> set:
        return {a.convexity for a in self.arcs}


def _arc_convexity(P: np.ndarray, closed: bool) -> str:
    if closed:
        prev, nxt = np.roll(P, 1, axis=0), np.roll(P, -1, axis=0)
        cur = P
    else:
        if len(P) < 3:
            return "flat"
        prev, cur, nxt = P[:-2], P[1:-1], P[2:]
    e1, e2 = cur - prev, nxt - cur
    cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    s = cross / (np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1))
    pos, neg = np.any(s > 1e-9), np.any(s < -1e-9)
    if pos and neg:
        return "mixed"
    return "convex" if pos else ("concave" if neg else "flat")


def indicatrix(spec: LagrangianSpec, level: float = 1.0, resolution: int = 720,
               tol: float = DEFAULT_TOL) -> Indicatrix:
    """Points of the level set ``L(v) = level`` along equally spaced rays.

    The radial root is ``r = sqrt(|level| / |L(u)|)`` on rays where ``L(u)``
    has the sign of ``level``; null rays are skipped.  Convexity is the sign
    of the discrete curvature along each arc traversed counter-clockwise.
    """
    if spec.dim != 2:
        raise ValueError("indicatrix needs a two-dimensional quartic")
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    if level == 0:
        raise ValueError("level must be nonzero")
    angles = 2 * np.pi * np.arange(resolution) / resolution
    U = _unit(angles)
    Lu = lagrangian_values(spec, U)
    null = sign_classes(spec, U, tol) == SignClass.NULL
    ok = np.isfinite(Lu) & (np.sign(Lu) == np.sign(level)) & ~null
    if not np.any(ok):
        return Indicatrix(level, [], note="no admissible directions")
    r = np.sqrt(abs(level) / np.abs(np.where(ok, Lu, 1.0)))
    pts = r[:, None] * U

    if np.all(ok):
        return Indicatrix(level, [IndicatrixArc(angles, pts, _arc_convexity(pts, True))])
    # split into maximal runs of admissible rays, joining across angle 0
    start = int(np.argmin(ok))  # first inadmissible ray
    order = np.roll(np.arange(resolution), -start)
    arcs, run = [], []
    for j in order:
        if ok[j]:
            run.append(j)
        elif run:
            arcs.append(run)
            run = []
    if run:
        arcs.append(run)
    out = [IndicatrixArc(angles[idx], pts[idx], _arc_convexity(pts[idx], False)) for idx in arcs]
    return Indicatrix(level, out)


# -- four-dimensional sampling ---------------------------------------------------

def sample_sphere(dim: int, n_points: int = 2**14, seed: int = 0) -> np.ndarray:
    """Low-discrepancy points on the unit sphere in ``R^dim`` (scrambled Sobol)."""
    m = int(round(math.log2(n_points)))
    if 2**m != n_points:
        raise ValueError("n_points must be a power of two")
    u = qmc.Sobol(d=dim, scramble=True, seed=seed).random_base2(m)
    z = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


@dataclass
class SphereClassification:
    points: np.ndarray
    labels: list
    counts: dict

    def inventory(self) -> dict[str, bool]:
        return {c: self.counts.get(c, 0) > 0 for c in SET_LETTERS}


def classify_sphere(spec: LagrangianSpec, n_points: int = 2**14, seed: int = 0,
                    tol: float = DEFAULT_TOL, chunk: int = 4096) -> SphereClassification:
    """Sampled classification of the unit sphere; chunks run on ``QF_THREADS`` workers."""
    P = sample_sphere(spec.dim, n_points, seed)
    chunks = [P[i:i + chunk] for i in range(0, len(P), chunk)]
    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        parts = list(pool.map(lambda c: classify_many(spec, c, tol)[0], chunks))
    labels = [lab for part in parts for lab in part]
    counts = {c: 0 for c in SET_LETTERS}
    for lab in labels:
        for c in lab.sets:
            counts[c] += 1
    return SphereClassification(P, labels, counts)
