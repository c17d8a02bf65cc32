import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from quartic_finsler.quartic import (
    QuarticError,
    SymQuadric,
    SymQuartic,
    UnsupportedDimensionError,
    aux,
    eval_quartic,
    from_diagonal_powers,
    from_quadric_product,
    from_quadric_square,
    load_quartic,
    multiset_index,
    quartic_from_json,
    save_quartic,
    symmetrize4,
    third_contraction,
)

floats = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def dense_arrays(n):
    return arrays(np.float64, (n, n, n, n), elements=floats)


def test_multiset_sizes():
    assert len(multiset_index(2).keys) == 5
    assert len(multiset_index(4).keys) == 35


@pytest.mark.parametrize("dim", [1, 3, 5])
def test_unsupported_dimension(dim):
    with pytest.raises(UnsupportedDimensionError):
        SymQuartic.zeros(dim)


def test_wrong_coefficient_count():
    with pytest.raises(QuarticError):
        SymQuartic(2, np.zeros(6))


@settings(max_examples=40, deadline=None)
@given(dense_arrays(2))
def test_symmetrize_is_idempotent_and_symmetric(T):
    M = symmetrize4(T)
    D = M.dense
    for p in itertools.permutations(range(4)):
        assert np.array_equal(D, np.transpose(D, p))
    assert np.array_equal(symmetrize4(D).coeffs, M.coeffs)


@settings(max_examples=20, deadline=None)
@given(dense_arrays(4), arrays(np.float64, 4, elements=floats))
def test_eval_matches_dense_contraction(T, v):
    M = symmetrize4(T)
    want = np.einsum("ijkl,i,j,k,l->", M.dense, v, v, v, v)
    # symmetrisation leaves the quartic form unchanged
    assert np.isclose(M.eval(v), want, rtol=1e-10, atol=1e-9 * (1 + np.abs(T).max() * (v @ v) ** 2))
    raw = np.einsum("ijkl,i,j,k,l->", T, v, v, v, v)
    assert np.isclose(M.eval(v), raw, rtol=1e-10, atol=1e-9 * (1 + np.abs(T).max() * (v @ v) ** 2))


def test_aux_relations(rng):
    M = symmetrize4(rng.normal(size=(4,) * 4))
    v = rng.normal(size=4)
    a = aux(M, v)
    assert np.allclose(a.N, a.K @ v, rtol=1e-13)
    assert np.isclose(a.Q, a.N @ v, rtol=1e-13)
    assert np.isclose(a.Q, M.eval(v), rtol=1e-12)
    assert np.array_equal(a.K, a.K.T)


def test_derivatives_of_q(rng):
    M = symmetrize4(rng.normal(size=(2,) * 4))
    v = rng.normal(size=2)
    h = 1e-5
    a = aux(M, v)
    grad = np.array([(M.eval(v + h * e) - M.eval(v - h * e)) / (2 * h) for e in np.eye(2)])
    assert np.allclose(grad, 4 * a.N, rtol=1e-7, atol=1e-8)
    # Hessian 12K via differences of the analytic gradient 4N
    hess = np.array([(4 * aux(M, v + h * e).N - 4 * aux(M, v - h * e).N) / (2 * h) for e in np.eye(2)])
    assert np.allclose(hess, 12 * a.K, rtol=1e-7, atol=1e-7)
    third = np.array([(12 * aux(M, v + h * e).K - 12 * aux(M, v - h * e).K) / (2 * h) for e in np.eye(2)])
    assert np.allclose(third, 24 * third_contraction(M, v), rtol=1e-6, atol=1e-6)


def test_constructors(rng):
    g = SymQuadric.diag(1.0, -2.0)
    h = SymQuadric(np.array([[2.0, 0.5], [0.5, 1.0]]))
    v = rng.normal(size=2)
    assert np.isclose(from_quadric_square(g).eval(v), g(v) ** 2, rtol=1e-13)
    assert np.isclose(from_quadric_product(g, h).eval(v), g(v) * h(v), rtol=1e-13)
    assert np.isclose(from_diagonal_powers([1.0, -3.0]).eval(v), v[0] ** 4 - 3 * v[1] ** 4, rtol=1e-13)
    with pytest.raises(QuarticError):
        from_quadric_product(g, SymQuadric.diag(1.0, 1.0, 1.0, 1.0))


def test_quadric_must_be_symmetric():
    with pytest.raises(QuarticError):
        SymQuadric(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_storage_is_read_only():
    M = from_diagonal_powers([1.0, 1.0])
    with pytest.raises(ValueError):
        M.dense[0, 0, 0, 0] = 2.0
    with pytest.raises(ValueError):
        M.coeffs[0] = 2.0


def test_component_access():
    M = SymQuartic.from_components(2, {(0, 1, 0, 1): 0.25})
    assert M[1, 0, 1, 0] == 0.25 == M[0, 0, 1, 1]
    # Q = 6 M_0011 a^2 b^2
    assert np.isclose(M.eval([1.0, 2.0]), 6 * 0.25 * 4)


def test_arithmetic():
    A = from_diagonal_powers([1.0, 2.0])
    B = from_diagonal_powers([3.0, -1.0])
    assert (A + B).allclose(from_diagonal_powers([4.0, 1.0]))
    assert (2 * A).allclose(from_diagonal_powers([2.0, 4.0]))


def test_json_round_trip(tmp_path, rng):
    M = symmetrize4(rng.normal(size=(4,) * 4))
    path = tmp_path / "m.json"
    save_quartic(M, path)
    assert np.array_equal(load_quartic(path).coeffs, M.coeffs)


@pytest.mark.parametrize("doc, v, want", [
    ({"dim": 2, "kind": "square", "g": [[1, 0], [0, 1]]}, (3.0, 4.0), 625.0),
    ({"dim": 2, "kind": "product", "g": [[1, 0], [0, 1]], "h": [[1, 0], [0, -1]]}, (2.0, 1.0), 15.0),
    ({"dim": 2, "kind": "diag_powers", "weights": [1, -1]}, (2.0, 1.0), 15.0),
    ({"dim": 2, "kind": "multiset", "coeffs": [[[0, 0, 0, 0], 1.0]]}, (2.0, 1.0), 16.0),
])
def test_json_kinds(doc, v, want):
    assert np.isclose(quartic_from_json(json.loads(json.dumps(doc))).eval(v), want)


def test_json_dense_kind():
    T = np.zeros((2,) * 4)
    T[0, 0, 1, 1] = 6.0  # only a^2 b^2 survives symmetrisation, with weight 6 / 6
    assert np.isclose(quartic_from_json({"dim": 2, "kind": "dense", "coeffs": T.tolist()}).eval([1, 1]), 6.0)


@pytest.mark.parametrize("doc", [{"kind": "square"}, {"dim": 2, "kind": "nope"},
                                 {"dim": 3, "kind": "diag_powers", "weights": [1, 1, 1]},
                                 {"dim": 4, "kind": "diag_powers", "weights": [1, 1]}])
def test_json_errors(doc):
    with pytest.raises(QuarticError):
        quartic_from_json(doc)


def test_eval_shape_check():
    with pytest.raises(QuarticError):
        eval_quartic(from_diagonal_powers([1.0, 1.0]), [1.0, 2.0, 3.0])
