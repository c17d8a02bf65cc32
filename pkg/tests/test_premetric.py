import itertools

import numpy as np
import pytest

from quartic_finsler.premetric import (
    UNIAXIAL_SECTIONS,
    BlockView,
    ConstitutiveTensor,
    SignatureError,
    assemble_chi,
    cross_section,
    fresnel_tensor,
    isotropic_chi,
    left_right_dual,
    levi_civita,
    split_chi,
    uniaxial_chi,
    uniaxial_quartic,
    vacuum_chi,
)
from quartic_finsler.quartic import SymQuadric, from_quadric_product, from_quadric_square

ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def fresnel_oracle(chi, q):
    """Independent Fresnel polynomial: (1/4!) e_mnpq e_rstu chi^mnri chi^jpsk chi^lqtu q_i q_j q_k q_l."""
    e = levi_civita(4)
    return np.einsum("mnpq,rstu,mnri,jpsk,lqtu,i,j,k,l->", e, e, chi, chi, chi, q, q, q, q,
                     optimize=True) / 24.0


def random_chi(rng):
    return ConstitutiveTensor.from_pair_matrix(rng.normal(size=(6, 6)))


def test_levi_civita():
    e = levi_civita(4)
    assert e[0, 1, 2, 3] == 1.0 and e[1, 0, 2, 3] == -1.0
    assert np.sum(np.abs(e)) == 24
    for p in itertools.permutations(range(4)):
        assert e[p] == -e[(p[1], p[0], p[2], p[3])]


def test_pair_antisymmetry_enforced():
    with pytest.raises(ValueError):
        ConstitutiveTensor(np.ones((4, 4, 4, 4)))
    with pytest.raises(ValueError):
        ConstitutiveTensor(np.zeros((3, 3, 3, 3)))


def test_pair_matrix_round_trip(rng):
    P = rng.normal(size=(6, 6))
    assert np.array_equal(ConstitutiveTensor.from_pair_matrix(P).pair_matrix(), P)


def test_block_round_trip(rng):
    b = BlockView(*(rng.normal(size=(3, 3)) for _ in range(4)))
    back = split_chi(assemble_chi(b))
    for name in ("eps", "pi", "gamma", "gamma_tilde"):
        assert np.array_equal(getattr(back, name), getattr(b, name))
    assert np.array_equal(BlockView.from_json(b.to_json()).eps, b.eps)


def test_block_shape_check():
    with pytest.raises(ValueError):
        BlockView.make(np.eye(2), np.eye(3))


def test_vacuum_blocks_match_isotropic_tensor():
    chi = assemble_chi(BlockView.make(np.eye(3), np.eye(3)))
    assert np.array_equal(chi.chi, isotropic_chi(ETA).chi)
    assert chi.chi[0, 1, 0, 1] == -0.5


def test_isotropic_needs_lorentzian_metric():
    with pytest.raises(SignatureError):
        isotropic_chi(np.eye(4))


def test_double_dual_is_identity(rng):
    chi = random_chi(rng)
    assert np.allclose(left_right_dual(left_right_dual(chi)), chi.chi, atol=1e-12)


def test_dual_keeps_pair_antisymmetry(rng):
    d = left_right_dual(random_chi(rng))
    assert np.allclose(d, -np.transpose(d, (1, 0, 2, 3)))
    assert np.allclose(d, -np.transpose(d, (0, 1, 3, 2)))


def test_fresnel_matches_independent_oracle(rng):
    for chi in (random_chi(rng), vacuum_chi(), uniaxial_chi(2.0, 3.0, 1.5)):
        G = fresnel_tensor(chi)
        for q in rng.normal(size=(10, 4)):
            want = fresnel_oracle(chi.chi, q)
            assert np.isclose(G(q), want, rtol=1e-10, atol=1e-12 * np.abs(chi.chi).max() ** 3 * (q @ q) ** 2)


def test_fresnel_tensor_fully_symmetric(rng):
    G = fresnel_tensor(random_chi(rng)).G
    for p in itertools.permutations(range(4)):
        assert np.array_equal(G, np.transpose(G, p))


def test_fresnel_cubic_in_chi(rng):
    chi = random_chi(rng)
    G1 = fresnel_tensor(chi).quartic
    G2 = fresnel_tensor(ConstitutiveTensor(2.0 * chi.chi)).quartic
    assert G2.allclose(G1 * 8.0)


def test_vacuum_fresnel_constant(rng):
    G = fresnel_tensor(vacuum_chi())
    eta = SymQuadric(ETA)
    for q in rng.normal(size=(100, 4)):
        assert np.isclose(G(q), -0.125 * eta(q) ** 2, rtol=1e-12, atol=1e-14)


def test_isotropic_fresnel_for_other_metrics(rng):
    # any Lorentzian metric g gives G proportional to (g^-1(q, q))^2
    A = rng.normal(size=(4, 4)) * 0.2 + np.eye(4)
    g = A.T @ ETA @ A
    g = 0.5 * (g + g.T)
    G = fresnel_tensor(isotropic_chi(g))
    gi = np.linalg.inv(g)
    ratios = [G(q) / (q @ gi @ q) ** 2 for q in rng.normal(size=(20, 4))]
    assert np.allclose(ratios, ratios[0], rtol=1e-8)


def test_uniaxial_proportional_to_product_form():
    for eo, ee, mu in [(2.0, 3.0, 1.0), (1.5, 0.7, 2.0), (4.0, 4.0, 0.5)]:
        G = fresnel_tensor(uniaxial_chi(eo, ee, mu)).quartic
        P = uniaxial_quartic(eo, ee, mu)
        assert G.allclose(P * (-1.0 / (8 * mu * mu)), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)])
def test_uniaxial_rejects_nonpositive(args):
    with pytest.raises(ValueError):
        uniaxial_chi(*args)
    with pytest.raises(ValueError):
        uniaxial_quartic(*args)


def test_cross_sections_of_uniaxial_form():
    eo, ee, mu = 2.0, 3.0, 1.0
    P = uniaxial_quartic(eo, ee, mu)
    want = {
        "i": from_quadric_square(SymQuadric.diag(eo * mu, -1.0)) * ee,
        "ii": from_quadric_product(SymQuadric.diag(eo * mu, -1.0), SymQuadric.diag(ee * mu, -1.0)) * eo,
        "iii": from_quadric_square(SymQuadric.diag(1.0, 1.0)) * eo,
        "iv": from_quadric_product(SymQuadric.diag(1.0, 1.0), SymQuadric.diag(eo, ee)),
    }
    for key, kept in UNIAXIAL_SECTIONS.items():
        assert cross_section(P, kept).allclose(want[key])


def test_cross_section_commutes_with_evaluation(rng):
    P = uniaxial_quartic(2.0, 3.0, 1.0)
    for kept in UNIAXIAL_SECTIONS.values():
        S = cross_section(P, kept)
        for x in rng.normal(size=(10, 2)):
            v = np.zeros(4)
            v[list(kept)] = x
            assert np.isclose(S.eval(x), P.eval(v), rtol=1e-14, atol=1e-14)


def test_cross_section_checks():
    P = uniaxial_quartic(2.0, 3.0, 1.0)
    with pytest.raises(ValueError):
        cross_section(P, (1, 1))
    with pytest.raises(ValueError):
        cross_section(P, (0, 4))
