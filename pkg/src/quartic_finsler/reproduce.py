"""Reference-result suite run by ``quartic-finsler reproduce``.

Each item recomputes a published or derived value and records pass/fail.
The table rows carry the documented corrections in ``TABLE_CORRECTIONS``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .classify import (
    classify_direction,
    det_zero_ratios,
    indicatrix,
    min_det_over_angles,
    parameter_map,
    scan_circle,
    signature_change_threshold,
)
from .lagrangian import Branch, LagrangianSpec, lagrangian_value
from .metric import determinant_closed_form, metric_at
from .premetric import (
    UNIAXIAL_SECTIONS,
    cross_section,
    fresnel_tensor,
    uniaxial_chi,
    uniaxial_quartic,
    vacuum_chi,
)
from .quartic import SymQuadric, from_quadric_product, from_quadric_square

LETTERS = "ABCDEFG"


def _inv(s: str) -> dict[str, bool]:
    return {c: c in s for c in LETTERS}


# nonempty sets per row as printed in the reference table; "C = {0}" means empty
TABLE = {
    "euclid_square": _inv("AF"),
    "power_sum": _inv("ADEF"),
    "lorentz_square": _inv("ACDG"),
    "power_diff": _inv("ABCDEG"),
    "ee": _inv("AEFG"),
    "el": _inv("ABCDEFG"),
    "ll": _inv("ACDG"),
}

# row -> (set, corrected value, parameter at which the printed row holds, reason)
TABLE_CORRECTIONS = {
    "power_sum": ("D", False, None,
                  "L = sqrt(a^4 + b^4) is smooth away from the origin, so D is empty"),
    "ll": ("B", True, 1.0,
           "for k != 1 the factors change sign separately and a timelike wedge "
           "appears between the lines a = b and a = sqrt(k) b; the printed row holds at k = 1"),
}

# parameters used for the table rows; ee needs k >= 34 for a Lorentzian region
TABLE_K = {"ee": 100.0, "el": 2.0, "ll": 2.0}


def expected_inventory(row: str, corrected: bool = True) -> dict[str, bool]:
    inv = dict(TABLE[row])
    if corrected and row in TABLE_CORRECTIONS:
        letter, value, _, _ = TABLE_CORRECTIONS[row]
        inv[letter] = value
    return inv


@dataclass
class Item:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


def _rel(a, b) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def table_items(resolution: int = 360) -> list[Item]:
    items = []
    for row in catalog.CATALOG_2D:
        spec = catalog.preset_spec(row, k=TABLE_K.get(row))
        got = scan_circle(spec, resolution).inventory()
        got = {c: got[c] for c in LETTERS}
        want = expected_inventory(row)
        items.append(Item(f"table/{row}", got == want,
                          {"inventory": got, "expected": want,
                           "correction": TABLE_CORRECTIONS.get(row, (None,) * 4)[3]}))
        corr = TABLE_CORRECTIONS.get(row)
        if corr and corr[2] is not None:
            spec = catalog.preset_spec(row, k=corr[2])
            got = {c: v for c, v in scan_circle(spec, resolution).inventory().items() if c in LETTERS}
            items.append(Item(f"table/{row}(k={corr[2]:g})/as-printed", got == TABLE[row],
                              {"inventory": got}))
    return items


def determinant_items() -> list[Item]:
    items = []
    checks = [
        ("power_sum", None, (1.0, 1.0), 1.5),
        ("ll", 2.0, (2.0, 1.0), -2.0),
        ("ee", 1.0, (0.3, 1.7), 1.0),
    ]
    for fam, k, v, want in checks:
        closed = determinant_closed_form(fam, v, k)
        spec = catalog.preset_spec(fam if k is None else f"{fam}({k:g})")
        engine = metric_at(spec, v).det
        ok = _rel(closed, want) <= 1e-12 and _rel(engine, want) <= 1e-9
        items.append(Item(f"det/{fam}{'' if k is None else f'({k:g})'}@{v}", ok,
                          {"closed_form": closed, "metric": engine, "expected": want}))
    # random agreement between the engine and the closed forms
    rng = np.random.default_rng(7)
    worst = 0.0
    for fam in ("power_sum", "power_diff", "ee", "el", "ll"):
        for _ in range(200):
            k = float(rng.uniform(0.05, 100.0))
            v = rng.normal(size=2)
            name = fam if fam in ("power_sum", "power_diff") else f"{fam}({k!r})"
            try:
                closed = determinant_closed_form(fam, v, k)
            except ValueError:
                continue
            ms = metric_at(catalog.preset_spec(name), v)
            if ms.defined:
                worst = max(worst, _rel(ms.det, closed))
    items.append(Item("det/random-agreement", worst <= 1e-9, {"max_rel_err": worst}))
    return items


def region_items() -> list[Item]:
    items = []
    k0 = signature_change_threshold("ee", 100)
    items.append(Item("map/ee/threshold", k0 == 34, {"smallest_k": k0,
                                                    "min_det_k33": min_det_over_angles("ee", 33.0),
                                                    "min_det_k34": min_det_over_angles("ee", 34.0)}))
    d = determinant_closed_form("ee", (10.0, 1.0), 300.0)
    items.append(Item("map/ee/k=300,v=(10,1)", d < 0, {"det": d}))
    ratios = det_zero_ratios("ee", 1e4)
    small = float(ratios.min()) if ratios.size else math.nan
    items.append(Item("map/ee/asymptote", _rel(small, math.sqrt(2)) <= 0.01,
                      {"alpha_over_beta": small, "target": math.sqrt(2)}))
    worst = 0.0
    for v in ((2.0, 1.0), (1.0, 2.0)):
        a, b = v
        asym = 1e4 * (2 * b * b - a * a) / (4 * (a * a + b * b))
        det = determinant_closed_form("ee", v, 1e4)
        worst = max(worst, _rel(asym, det))
    items.append(Item("map/ee/asymptotic-det", worst <= 0.01, {"max_rel_err": worst}))
    pm = parameter_map("ll", (0.01, 100.0), (0.0, np.pi / 2), (64, 64))
    items.append(Item("map/ll/no-euclidean", pm.count("euclidean") == 0,
                      {"euclidean_cells": pm.count("euclidean"),
                       "lorentzian_cells": pm.count("lorentzian")}))
    pm = parameter_map("ee", (1.0, 50.0), (0.0, np.pi / 2), (64, 64))
    items.append(Item("map/ee/rows", len(list(pm.rows())) == 4096, {"rows": 4096}))
    return items


def indicatrix_items() -> list[Item]:
    items = []
    ind = indicatrix(catalog.preset_spec("euclid_square"), 1.0, 720)
    r = np.linalg.norm(ind.points, axis=1)
    items.append(Item("indicatrix/euclid_square", float(np.max(np.abs(r - 1))) <= 1e-12,
                      {"max_radius_error": float(np.max(np.abs(r - 1)))}))
    spec = catalog.preset_spec("ee(100)")
    ind = indicatrix(spec, 1.0, 720)
    conv = sorted(ind.convexity)
    items.append(Item("indicatrix/ee(100)/mixed", conv == ["mixed"], {"convexity": conv}))
    ind = indicatrix(catalog.preset_spec("ee(1)"), 1.0, 720)
    items.append(Item("indicatrix/ee(1)/convex", sorted(ind.convexity) == ["convex"],
                      {"convexity": sorted(ind.convexity)}))
    for name, want in (("el(2)", ["concave"]), ("el(0.01)", ["mixed"])):
        conv = sorted(indicatrix(catalog.preset_spec(name), 1.0, 720).convexity)
        items.append(Item(f"indicatrix/{name}/{want[0]}", conv == want, {"convexity": conv}))
    # the signed root of a square is |g(v)|, so level +1 gives both hyperbolas g = +-1
    spec = catalog.preset_spec("lorentz_square")
    ind = indicatrix(spec, 1.0, 720)
    P = ind.points
    g = P[:, 0] ** 2 - P[:, 1] ** 2
    resid = float(np.max(np.abs(np.abs(g) - 1.0)))
    items.append(Item("indicatrix/lorentz_square/hyperbolas",
                      len(ind.arcs) == 4 and resid <= 1e-9 and bool(np.any(g < 0) and np.any(g > 0)),
                      {"arcs": len(ind.arcs), "max_residual": resid}))
    empty = indicatrix(spec, -1.0, 720)
    items.append(Item("indicatrix/lorentz_square/level=-1", not empty.arcs, {"note": empty.note}))
    # timelike arcs of ll(2) live in the wedges 1 < |a/b| < sqrt(2)
    spec = catalog.preset_spec("ll(2)")
    ind = indicatrix(spec, -1.0, 720)
    P = ind.points
    ratio = np.abs(P[:, 0] / P[:, 1])
    resid = max(abs(lagrangian_value(spec, p) + 1.0) for p in P)
    wedge = bool(np.all((ratio > 1) & (ratio < math.sqrt(2))))
    items.append(Item("indicatrix/ll(2)/level=-1", wedge and resid <= 1e-9 and len(ind.arcs) == 4,
                      {"arcs": len(ind.arcs), "max_residual": resid, "in_wedge": wedge}))
    return items


def vacuum_items(n: int = 1000) -> list[Item]:
    G = fresnel_tensor(vacuum_chi())
    rng = np.random.default_rng(11)
    eta = SymQuadric.diag(1.0, -1.0, -1.0, -1.0)
    ratios = []
    for q in rng.normal(size=(n, 4)):
        m = eta(q)
        if abs(m) > 1e-3 * float(q @ q):
            ratios.append(G(q) / m**2)
    ratios = np.array(ratios)
    lam = float(np.median(ratios))
    spread = float(np.max(np.abs(ratios - lam)) / abs(lam))
    return [Item("fresnel/vacuum", spread <= 1e-10 and _rel(lam, -0.125) <= 1e-12,
                 {"lambda": lam, "max_rel_spread": spread})]


def uniaxial_report(eps_o: float = 2.0, eps_e: float = 3.0, mu: float = 1.0,
                    resolution: int = 720) -> list[Item]:
    """Proportionality to the product form and the four coordinate cross-sections."""
    items = []
    G = fresnel_tensor(uniaxial_chi(eps_o, eps_e, mu)).quartic
    P = uniaxial_quartic(eps_o, eps_e, mu)
    lam = -1.0 / (8 * mu * mu)
    err = float(np.max(np.abs(G.coeffs - lam * P.coeffs)) / np.max(np.abs(lam * P.coeffs)))
    items.append(Item("uniaxial/proportional", err <= 1e-10, {"lambda": lam, "max_rel_err": err}))

    k = eps_e / eps_o
    expected = {
        # (i) eps_e (eps_o mu w^2 - q3^2)^2
        "i": (from_quadric_square(SymQuadric.diag(eps_o * mu, -1.0)) * eps_e, "lorentz_square"),
        # (ii) eps_o (eps_o mu w^2 - q1^2)(eps_e mu w^2 - q1^2)
        "ii": (from_quadric_product(SymQuadric.diag(eps_o * mu, -1.0),
                                    SymQuadric.diag(eps_e * mu, -1.0)) * eps_o, "ll"),
        # (iii) eps_o (q1^2 + q2^2)^2
        "iii": (from_quadric_square(SymQuadric.diag(1.0, 1.0)) * eps_o, "euclid_square"),
        # (iv) (q1^2 + q3^2)(eps_o q1^2 + eps_e q3^2)
        "iv": (from_quadric_product(SymQuadric.diag(1.0, 1.0),
                                    SymQuadric.diag(eps_o, eps_e)), "ee"),
    }
    for key, kept in UNIAXIAL_SECTIONS.items():
        sec = cross_section(P, kept)
        want, family = expected[key]
        same = sec.allclose(want)
        spec = LagrangianSpec(sec, Branch.SIGNED)
        cmap = scan_circle(spec, resolution)
        inv = cmap.inventory()
        states = {lab.metric_state.value for lab in cmap.labels} - {"undefined"}
        if family in ("lorentz_square", "ll"):
            ok_class = states == {"lorentzian"} and inv["C"] and not inv["E"]
        elif family == "euclid_square":
            ok_class = states == {"euclidean"} and not inv["C"]
        else:
            # ee with k = eps_e / eps_o; Lorentzian cells only for k >= 34
            ok_class = (not inv["C"]) and "euclidean" in states and (("lorentzian" in states) == (k >= 34))
        # null directions must lie on the ordinary or extraordinary cone
        cone_err = 0.0
        for ang in cmap.boundary_angles("C"):
            a, b = math.cos(ang), math.sin(ang)
            if key in ("i", "ii"):
                w, q = a, b
                cones = [abs(eps_o * mu * w * w - q * q)]
                cones.append(abs(eps_e * mu * w * w - q * q) if key == "ii" else cones[0])
                cone_err = max(cone_err, min(cones))
        items.append(Item(f"uniaxial/section-{key}", bool(same and ok_class and cone_err <= 1e-8),
                          {"kept": list(kept), "family": family, "matches_form": bool(same),
                           "metric_states": sorted(states),
                           "null_directions": len(cmap.boundary_angles("C")),
                           "max_cone_residual": cone_err}))
    return items


def classify_items() -> list[Item]:
    checks = [
        ("power_diff", (2.0, 1.0), ("spacelike", "lorentzian")),
        ("power_sum", (1.0, 0.0), ("spacelike", "degenerate")),
        ("lorentz_square", (1.0, 1.0), ("null", "undefined")),
    ]
    items = []
    for name, v, (sign, metric) in checks:
        lab = classify_direction(catalog.preset_spec(name), v)
        items.append(Item(f"classify/{name}@{v}", (lab.sign.value, lab.metric_state.value) == (sign, metric),
                          lab.to_json()))
    return items


SECTIONS = {
    "table": table_items,
    "determinants": determinant_items,
    "regions": region_items,
    "indicatrices": indicatrix_items,
    "vacuum": vacuum_items,
    "uniaxial": uniaxial_report,
    "classify": classify_items,
}


def run_all(sections=None) -> dict:
    items = []
    for name in sections or SECTIONS:
        items.extend(SECTIONS[name]())
    return {
        "passed": all(i.passed for i in items),
        "n_items": len(items),
        "n_failed": sum(not i.passed for i in items),
        "items": [i.to_json() for i in items],
    }
