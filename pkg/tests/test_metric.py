import math

import numpy as np
import pytest

from quartic_finsler import catalog
from quartic_finsler.lagrangian import Branch, LagrangianSpec, lagrangian_value
from quartic_finsler.metric import (
    REASON_DOMAIN,
    REASON_NULL,
    OriginError,
    SingularInputError,
    UndefinedMetricError,
    cartan_at,
    closed_form_det_array,
    determinant_closed_form,
    fd_oracle,
    fd_third,
    metric_at,
    metric_batch,
    norm_wrt,
    signature_counts,
)
from quartic_finsler.quartic import SymQuadric, from_quadric_square

from conftest import random_offnull, spec_of


def test_euclid_square_is_identity(rng):
    for v in rng.normal(size=(10, 2)):
        assert np.allclose(metric_at(spec_of("euclid_square"), v).f, np.eye(2), atol=1e-14)


def test_power_sum_at_diagonal():
    ms = metric_at(spec_of("power_sum"), (1.0, 1.0))
    assert np.allclose(ms.f, 2**-1.5 * np.array([[4.0, -2.0], [-2.0, 4.0]]), rtol=1e-14)
    assert math.isclose(ms.det, 1.5, rel_tol=1e-14)
    assert ms.signature == (2, 0, 0)


def test_lorentz_square_standard_form():
    ms = metric_at(spec_of("lorentz_square"), (2.0, 1.0))
    assert np.allclose(ms.f, np.diag([1.0, -1.0]), atol=1e-14)
    assert ms.signature == (1, 1, 0)


def test_null_direction_is_undefined():
    ms = metric_at(spec_of("power_diff"), (1.0, 1.0))
    assert not ms.defined and ms.reason == REASON_NULL and ms.signature is None
    assert ms.to_json()["f"] is None


def test_restricted_branch_outside_domain():
    ms = metric_at(spec_of("power_diff", "restricted"), (1.0, 2.0))
    assert not ms.defined and ms.reason == REASON_DOMAIN


def test_origin_raises():
    with pytest.raises(OriginError):
        metric_at(spec_of("power_sum"), (0.0, 0.0))


def test_wrong_shape_raises():
    with pytest.raises(ValueError):
        metric_at(spec_of("power_sum"), (1.0, 0.0, 0.0))


def test_metric_is_exactly_symmetric(rng):
    spec = spec_of("el")
    for v in random_offnull(spec, rng, 20):
        f = metric_at(spec, v).f
        assert np.array_equal(f, f.T)


def test_determinant_agrees_with_lu(rng):
    # away from the null cone the rank-one identity and LU of f agree closely
    for name in catalog.CATALOG_2D:
        spec = spec_of(name)
        for v in random_offnull(spec, rng, 20, margin=0.1):
            ms = metric_at(spec, v)
            assert math.isclose(ms.det, np.linalg.det(ms.f), rel_tol=1e-8, abs_tol=1e-12)


def test_signature_counts():
    assert signature_counts(np.diag([2.0, -1.0, 0.0, 1e-12])) == (1, 1, 2)
    assert signature_counts(np.diag([1.0, 1.0])) == (2, 0, 0)


def test_two_dimensional_signature_rule(rng):
    for name in catalog.CATALOG_2D:
        spec = spec_of(name)
        for v in random_offnull(spec, rng, 50):
            ms = metric_at(spec, v)
            if abs(ms.det) < 1e-8 * np.max(np.abs(ms.f)) ** 2:
                continue
            if ms.det > 0:
                assert ms.signature in ((2, 0, 0), (0, 2, 0))
            else:
                assert ms.signature == (1, 1, 0)


def test_batch_matches_scalar(rng):
    for name in ("power_diff", "el", "ll", "uniaxial"):
        spec = spec_of(name)
        V = rng.normal(size=(64, spec.dim))
        batch = metric_batch(spec, V)
        for i, v in enumerate(V):
            ms = metric_at(spec, v)
            assert ms.defined == bool(batch.defined[i])
            if ms.defined:
                assert np.allclose(batch.f[i], ms.f, rtol=1e-12, atol=1e-12 * np.abs(ms.f).max())
                assert math.isclose(batch.det[i], ms.det, rel_tol=1e-10)
                assert tuple(batch.signature[i]) == ms.signature


def test_json_layout():
    doc = metric_at(spec_of("power_sum"), (1.0, 1.0)).to_json()
    assert set(doc) == {"v", "f", "det", "signature", "defined", "reason"}
    assert len(doc["f"]) == 4 and doc["signature"] == [2, 0, 0]


# -- closed forms ------------------------------------------------------------------

@pytest.mark.parametrize("family, v, k, want", [
    ("power_sum", (1.0, 1.0), None, 1.5),
    ("ll", (2.0, 1.0), 2.0, -2.0),
    ("ee", (0.3, -2.0), 1.0, 1.0),
    ("ee", (10.0, 1.0), 300.0, -2_499_500 / (4 * 101 * 400)),
    ("power_diff", (2.0, 1.0), None, -12 / 15),
])
def test_closed_form_values(family, v, k, want):
    assert math.isclose(determinant_closed_form(family, v, k), want, rel_tol=1e-14)


@pytest.mark.parametrize("family, v, k", [("power_diff", (1.0, -1.0), None), ("el", (2.0, 1.0), 4.0),
                                          ("ll", (1.0, 1.0), 3.0), ("ll", (3.0, 1.0), 9.0),
                                          ("ee", (0.0, 0.0), 2.0)])
def test_closed_form_singular(family, v, k):
    with pytest.raises(SingularInputError):
        determinant_closed_form(family, v, k)


def test_closed_form_needs_k():
    with pytest.raises(ValueError):
        determinant_closed_form("ee", (1.0, 2.0))
    with pytest.raises(ValueError):
        closed_form_det_array("cubic", 1.0, 1.0, 1.0)


def test_ee_numerator_value():
    # numerator of the ee determinant at k = 300, v = (10, 1)
    k, a2, b2 = 300.0, 100.0, 1.0
    assert 2 * (1 + k) * a2**2 - (k * k - 10 * k + 1) * a2 * b2 + 2 * k * (k + 1) * b2**2 == -2_499_500


# -- norms ------------------------------------------------------------------------

def test_norm_of_the_direction_itself(rng):
    for name in catalog.CATALOG_2D:
        spec = spec_of(name)
        for v in random_offnull(spec, rng, 10):
            assert math.isclose(norm_wrt(spec, v, v), lagrangian_value(spec, v), rel_tol=1e-10)


def test_norm_examples(rng):
    assert abs(norm_wrt(spec_of("power_sum"), (1.0, 0.0), (0.0, 1.0))) == 0.0
    assert math.isclose(norm_wrt(spec_of("euclid_square"), rng.normal(size=2), (3.0, 4.0)), 25.0)
    with pytest.raises(UndefinedMetricError):
        norm_wrt(spec_of("power_diff"), (1.0, 1.0), (1.0, 0.0))


# -- oracle -----------------------------------------------------------------------

def test_oracle_second_order_convergence():
    spec = spec_of("el")
    v = np.array([1.3, 0.4])
    exact = metric_at(spec, v).f
    e1 = np.max(np.abs(fd_oracle(spec, v, 1e-2) - exact))
    e2 = np.max(np.abs(fd_oracle(spec, v, 5e-3) - exact))
    assert 3.0 < e1 / e2 < 5.0


def test_fd_oracle_error_grows_near_null_cone():
    # truncation error of the oracle scales like (h / d)^2 with d the angle to a
    # simple null direction, so the closed form is the accurate side near the cone
    spec = spec_of("el")
    root = np.arctan(1 / np.sqrt(2.0))
    errs = []
    for d in (1e-2, 1e-1):
        v = np.array([np.cos(root + d), np.sin(root + d)])
        exact = metric_at(spec, v).f
        errs.append(np.max(np.abs(fd_oracle(spec, v, 1e-4) - exact)) / np.max(np.abs(exact)))
    assert 30.0 < errs[0] / errs[1] < 300.0
    assert errs[1] < 1e-5


# -- Cartan tensor ------------------------------------------------------------------

def test_cartan_vanishes_for_squares(rng):
    specs = [spec_of("euclid_square"), spec_of("lorentz_square"),
             LagrangianSpec(from_quadric_square(SymQuadric.diag(2.0, -1.0, -3.0, 0.5)))]
    # the stored M_0011 = fl(-1/3) is not exactly a square, so very close to the
    # null cone the Cartan tensor of the stored form is itself ~1e-11
    for spec in specs:
        for v in random_offnull(spec, rng, 200, margin=0.05):
            assert np.max(np.abs(cartan_at(spec, v).C)) <= 1e-12


def test_cartan_fully_symmetric(rng):
    spec = spec_of("uniaxial")
    for v in random_offnull(spec, rng, 5):
        C = cartan_at(spec, v).C
        for p in ((1, 0, 2), (0, 2, 1), (2, 1, 0)):
            assert np.allclose(C, np.transpose(C, p), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("name, branch", [("power_sum", "signed"), ("power_diff", "signed"),
                                          ("power_diff", "abs"), ("el", "signed"), ("ll", "abs")])
def test_cartan_matches_third_differences(name, branch, rng):
    spec = spec_of(name, branch)
    for v in random_offnull(spec, rng, 5, margin=0.1):
        C = cartan_at(spec, v).C
        T = fd_third(spec, v, 2e-4) / 4
        assert np.max(np.abs(C - T)) <= 1e-4 * max(1.0, np.max(np.abs(C)))


def test_cartan_undefined_on_null():
    with pytest.raises(UndefinedMetricError):
        cartan_at(spec_of("power_diff"), (1.0, 1.0))
