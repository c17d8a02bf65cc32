"""Named presets: the two-dimensional quartic catalog and the EM media.

Preset strings accept an optional argument list, e.g. ``"ee(100)"`` or
``"uniaxial(2,3,1)"``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .lagrangian import Branch, LagrangianSpec
from .premetric import ConstitutiveTensor, uniaxial_chi, uniaxial_quartic, vacuum_chi
from .quartic import SymQuadric, SymQuartic, from_diagonal_powers, from_quadric_product, from_quadric_square

# default parameters; ee needs k >= 34 before a Lorentzian region appears
DEFAULT_K = {"ee": 100.0, "el": 2.0, "ll": 2.0}
DEFAULT_UNIAXIAL = (2.0, 3.0, 1.0)

CATALOG_2D = ("euclid_square", "power_sum", "lorentz_square", "power_diff", "ee", "el", "ll")
SQUARE_PRESETS = ("euclid_square", "lorentz_square")
EM_PRESETS = ("vacuum", "uniaxial")

# catalog name -> closed-form determinant family
FAMILY_OF = {"power_sum": "power_sum", "power_diff": "power_diff", "ee": "ee", "el": "el", "ll": "ll"}


def euclid_square() -> SymQuartic:
    return from_quadric_square(SymQuadric.diag(1.0, 1.0))


def lorentz_square() -> SymQuartic:
    return from_quadric_square(SymQuadric.diag(1.0, -1.0))


def power_sum() -> SymQuartic:
    return from_diagonal_powers([1.0, 1.0])


def power_diff() -> SymQuartic:
    return from_diagonal_powers([1.0, -1.0])


def ee(k: float) -> SymQuartic:
    """``(a^2 + b^2)(a^2 + k b^2)``"""
    return from_quadric_product(SymQuadric.diag(1.0, 1.0), SymQuadric.diag(1.0, k))


def el(k: float) -> SymQuartic:
    """``(a^2 + b^2)(a^2 - k b^2)``"""
    return from_quadric_product(SymQuadric.diag(1.0, 1.0), SymQuadric.diag(1.0, -k))


def ll(k: float) -> SymQuartic:
    """``(a^2 - b^2)(a^2 - k b^2)``"""
    return from_quadric_product(SymQuadric.diag(1.0, -1.0), SymQuadric.diag(1.0, -k))


_PRESET_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\(([^)]*)\))?\s*$")


@dataclass(frozen=True)
class Preset:
    name: str
    args: tuple[float, ...]

    @property
    def label(self) -> str:
        return f"{self.name}({','.join(f'{a:g}' for a in self.args)})" if self.args else self.name


def parse_preset(text: str, k: float | None = None) -> Preset:
    m = _PRESET_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse preset {text!r}")
    name = m.group(1)
    args = tuple(float(x) for x in m.group(2).split(",")) if m.group(2) else ()
    if name in DEFAULT_K:
        if not args:
            args = (float(k) if k is not None else DEFAULT_K[name],)
        if len(args) != 1 or not args[0] > 0:
            raise ValueError(f"{name} takes one positive parameter k")
    elif name == "uniaxial":
        args = args or DEFAULT_UNIAXIAL
        if len(args) != 3:
            raise ValueError("uniaxial takes (eps_o, eps_e, mu)")
    elif name in CATALOG_2D or name == "vacuum":
        if args:
            raise ValueError(f"{name} takes no parameters")
    else:
        raise ValueError(f"unknown preset {name!r}")
    return Preset(name, args)


def preset_quartic(text: str, k: float | None = None) -> SymQuartic:
    p = parse_preset(text, k)
    if p.name in DEFAULT_K:
        return {"ee": ee, "el": el, "ll": ll}[p.name](p.args[0])
    if p.name == "uniaxial":
        return uniaxial_quartic(*p.args)
    if p.name == "vacuum":
        from .premetric import fresnel_tensor

        return fresnel_tensor(vacuum_chi()).quartic
    return {"euclid_square": euclid_square, "power_sum": power_sum,
            "lorentz_square": lorentz_square, "power_diff": power_diff}[p.name]()


def preset_spec(text: str, branch=Branch.SIGNED, k: float | None = None) -> LagrangianSpec:
    return LagrangianSpec(preset_quartic(text, k), Branch.parse(branch))


def preset_chi(text: str) -> ConstitutiveTensor:
    p = parse_preset(text)
    if p.name == "vacuum":
        return vacuum_chi()
    if p.name == "uniaxial":
        return uniaxial_chi(*p.args)
    raise ValueError(f"preset {text!r} is not a constitutive medium")


def catalog_specs(branch=Branch.SIGNED) -> dict[str, LagrangianSpec]:
    """The seven two-dimensional catalog quartics with default parameters."""
    return {name: preset_spec(name, branch) for name in CATALOG_2D}
