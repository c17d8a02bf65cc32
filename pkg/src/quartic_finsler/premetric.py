"""Fresnel dispersion quartics from linear constitutive tensors.

Index 0 is time, 1..3 space.  A bivector pair ``[ij]`` is either electric
``(0, a)`` or magnetic ``(b, c)``, the latter labelled by ``a`` with
``eps_abc = +1``.  The 6 x 6 pair matrix of ``chi`` is filled as::

    chi[(0a), (0b)] = -eps^ab / 2        chi[(0a), B_b] = gamma^a_b / 2
    chi[B_a, (0b)]  = gamma~^a_b / 2     chi[B_a, B_b]  = pi_ab / 2

With this placement ``eps = pi = 1`` reproduces the vacuum tensor of the
Minkowski metric ``diag(1, -1, -1, -1)`` exactly.  The Levi-Civita symbol
has ``eps_0123 = +1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quartic import SymQuadric, SymQuartic, from_quadric_product, symmetrize4


class SignatureError(ValueError):
    pass


@lru_cache(maxsize=None)
def levi_civita(n: int = 4) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for p in itertools.permutations(range(n)):
        inversions = sum(p[i] > p[j] for i in range(n) for j in range(i + 1, n))
        eps[p] = -1.0 if inversions % 2 else 1.0
    eps.setflags(write=False)
    return eps


# pair slots: three electric, then three magnetic
_ELECTRIC = ((0, 1), (0, 2), (0, 3))
_MAGNETIC = ((2, 3), (3, 1), (1, 2))
_PAIRS = _ELECTRIC + _MAGNETIC


def _check_pair_antisymmetry(chi: np.ndarray) -> None:
    if not (np.array_equal(chi, -np.transpose(chi, (1, 0, 2, 3)))
            and np.array_equal(chi, -np.transpose(chi, (0, 1, 3, 2)))):
        raise ValueError("constitutive tensor must satisfy chi^ijkl = -chi^jikl = -chi^ijlk")


@dataclass(frozen=True, eq=False)
class ConstitutiveTensor:
    """Rank-4 constitutive tensor with pair antisymmetry (36 components)."""

    chi: np.ndarray

    def __post_init__(self):
        chi = np.array(self.chi, dtype=float)
        if chi.shape != (4, 4, 4, 4):
            raise ValueError(f"expected shape (4, 4, 4, 4), got {chi.shape}")
        _check_pair_antisymmetry(chi)
        chi.setflags(write=False)
        object.__setattr__(self, "chi", chi)

    @classmethod
    def from_pair_matrix(cls, P) -> "ConstitutiveTensor":
        """Expand a 6 x 6 matrix over the pairs ``01 02 03 23 31 12``."""
        P = np.asarray(P, dtype=float)
        chi = np.zeros((4, 4, 4, 4))
        for I, (i, j) in enumerate(_PAIRS):
            for J, (k, l) in enumerate(_PAIRS):
                chi[i, j, k, l] = P[I, J]
                chi[j, i, k, l] = -P[I, J]
                chi[i, j, l, k] = -P[I, J]
                chi[j, i, l, k] = P[I, J]
        return cls(chi)

    def pair_matrix(self) -> np.ndarray:
        return np.array([[self.chi[i, j, k, l] for (k, l) in _PAIRS] for (i, j) in _PAIRS])


@dataclass(frozen=True, eq=False)
class BlockView:
    eps: np.ndarray
    pi: np.ndarray
    gamma: np.ndarray
    gamma_tilde: np.ndarray

    def __post_init__(self):
        for name in ("eps", "pi", "gamma", "gamma_tilde"):
            a = np.array(getattr(self, name), dtype=float)
            if a.shape != (3, 3):
                raise ValueError(f"block {name} must be 3 x 3, got {a.shape}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def make(cls, eps, pi, gamma=None, gamma_tilde=None) -> "BlockView":
        z = np.zeros((3, 3))
        return cls(eps, pi, z if gamma is None else gamma, z if gamma_tilde is None else gamma_tilde)

    def to_json(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("eps", "pi", "gamma", "gamma_tilde")}

    @classmethod
    def from_json(cls, doc: dict) -> "BlockView":
        def block(key):
            a = np.asarray(doc.get(key, np.zeros(9)), dtype=float)
            return a.reshape(3, 3)

        return cls(block("eps"), block("pi"), block("gamma"), block("gamma_tilde"))


def assemble_chi(blocks: BlockView) -> ConstitutiveTensor:
    P = np.empty((6, 6))
    P[:3, :3] = -0.5 * blocks.eps
    P[:3, 3:] = 0.5 * blocks.gamma
    P[3:, :3] = 0.5 * blocks.gamma_tilde
    P[3:, 3:] = 0.5 * blocks.pi
    return ConstitutiveTensor.from_pair_matrix(P)


def split_chi(chi: ConstitutiveTensor) -> BlockView:
    P = chi.pair_matrix()
    return BlockView(-2.0 * P[:3, :3], 2.0 * P[3:, 3:], 2.0 * P[:3, 3:], 2.0 * P[3:, :3])


def isotropic_chi(g) -> ConstitutiveTensor:
    """``chi^ijkl = sqrt(-det g) (g^ik g^jl - g^il g^jk) / 2`` with ``g^`` the inverse of ``g``."""
    g = g.matrix if isinstance(g, SymQuadric) else np.asarray(g, dtype=float)
    det = float(np.linalg.det(g))
    if det >= 0:
        raise SignatureError(f"isotropic tensor needs det g < 0 (Lorentzian), got {det}")
    gi = np.linalg.inv(g)
    chi = 0.5 * np.sqrt(-det) * (np.einsum("ik,jl->ijkl", gi, gi) - np.einsum("il,jk->ijkl", gi, gi))
    return ConstitutiveTensor(chi)


def left_right_dual(chi: ConstitutiveTensor) -> np.ndarray:
    """``chi~_abcd = (1/4) eps_abmn chi^mnkl eps_klcd`` (all indices lower).

    The result keeps the pair antisymmetries of ``chi``; applying the same
    contraction twice returns ``chi`` with a plus sign.
    """
    eps = levi_civita(4)
    return 0.25 * np.einsum("abmn,mnkl,klcd->abcd", eps, np.asarray(getattr(chi, "chi", chi)), eps)


@dataclass(frozen=True, eq=False)
class FresnelTensor:
    """Fully symmetric Fresnel tensor ``G^ijkl``; ``G(q)`` is the dispersion quartic."""

    quartic: SymQuartic

    @property
    def G(self) -> np.ndarray:
        return self.quartic.dense

    def __call__(self, q) -> float:
        return self.quartic.eval(q)


def fresnel_tensor(chi: ConstitutiveTensor) -> FresnelTensor:
    """``G^ijkl = (1/3!) chi^{a(ij|b} chi~_acbd chi^{c|kl)d}``.

    The dual carries its indices in the order ``(a, c, b, d)`` of the pattern;
    the symmetrisation is the average over all 24 permutations of ``ijkl``.
    """
    dual = left_right_dual(chi)
    T = np.einsum("aijb,acbd,ckld->ijkl", chi.chi, dual, chi.chi) / 6.0
    return FresnelTensor(symmetrize4(T))


def vacuum_chi() -> ConstitutiveTensor:
    return isotropic_chi(np.diag([1.0, -1.0, -1.0, -1.0]))


def _check_positive(**params):
    for name, val in params.items():
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")


def uniaxial_chi(eps_o: float, eps_e: float, mu: float) -> ConstitutiveTensor:
    """Uniaxial crystal: ``eps = diag(eps_o, eps_o, eps_e)``, ``pi = I / mu``."""
    _check_positive(eps_o=eps_o, eps_e=eps_e, mu=mu)
    return assemble_chi(BlockView.make(np.diag([eps_o, eps_o, eps_e]), np.eye(3) / mu))


def uniaxial_quartic(eps_o: float, eps_e: float, mu: float) -> SymQuartic:
    """Product form of the uniaxial dispersion relation in ``(omega, q1, q2, q3)``.

    ``(eps_o mu w^2 - |q|^2)(mu eps_o eps_e w^2 - eps_o (q1^2 + q2^2) - eps_e q3^2)``;
    the first factor is the ordinary cone, the second the extraordinary one.
    The Fresnel tensor of :func:`uniaxial_chi` equals ``-1/(8 mu^2)`` times this.
    """
    _check_positive(eps_o=eps_o, eps_e=eps_e, mu=mu)
    ordinary = SymQuadric.diag(eps_o * mu, -1.0, -1.0, -1.0)
    extraordinary = SymQuadric.diag(mu * eps_o * eps_e, -eps_o, -eps_o, -eps_e)
    return from_quadric_product(ordinary, extraordinary)


def cross_section(M: SymQuartic, kept) -> SymQuartic:
    """Restrict a quartic to the coordinate plane spanned by ``kept = (i, j)``."""
    i, j = (int(x) for x in kept)
    if i == j:
        raise ValueError("kept indices must be distinct")
    if not (0 <= i < M.dim and 0 <= j < M.dim):
        raise ValueError(f"indices {kept} out of range for dim {M.dim}")
    sub = M.dense[np.ix_([i, j], [i, j], [i, j], [i, j])]
    return symmetrize4(sub)


# cross-sections of the uniaxial quartic, coordinates (omega, q1, q2, q3)
UNIAXIAL_SECTIONS = {
    "i": (0, 3),    # q1 = q2 = 0
    "ii": (0, 1),   # q2 = q3 = 0
    "iii": (1, 2),  # omega = q3 = 0
    "iv": (1, 3),   # omega = q2 = 0
}
