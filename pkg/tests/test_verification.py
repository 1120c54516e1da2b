import numpy as np
import pytest

from afstruct import BlockSwap, GenericInvolution, Hypersphere, InvalidInputError, ProductOfSpheres, induce_at_point
from afstruct.config import parse_config
from afstruct.verification import (
    CODIM1_IDS,
    CODIM2_IDS,
    PRODUCT_FORM_IDS,
    SPHERE_FORM_IDS,
    THEOREM_ID,
    Fault,
    check_closed_forms,
    check_closed_forms_random,
    check_codim1,
    check_codim2,
    check_theorem_chain,
    codim1_residuals,
    codim2_residuals,
    run_full_suite,
)

S11 = BlockSwap(1, 1, (1,), (1,))
S12 = BlockSwap(1, 2, (1,), (1, 1))


def _by_id(reports):
    return {r.identity_id: r for r in reports}


def test_codim1_small_case_passes():
    reports = check_codim1(S11, Hypersphere(3, 1.0), 100, 8, seed=3)
    assert [r.identity_id for r in reports] == list(CODIM1_IDS)
    assert all(r.passed and r.samples > 0 for r in reports)
    assert max(r.max_residual for r in reports) <= 1e-10


def test_codim2_small_case_passes():
    reports = check_codim2(S12, ProductOfSpheres(1, 2, 1.0, 1.0), 100, 8, seed=3)
    assert [r.identity_id for r in reports] == list(CODIM2_IDS)
    assert all(r.passed for r in reports)


def test_codim2_chain_route_passes():
    s = BlockSwap(2, 3, (1, -1), (-1, 1, -1))
    reports = check_codim2(s, ProductOfSpheres(2, 3, 0.5, 2.0), 50, 8, seed=5, route="chain")
    assert all(r.passed for r in reports)


def test_unknown_route_rejected():
    with pytest.raises(InvalidInputError):
        check_codim2(S12, ProductOfSpheres(1, 2, 1.0, 1.0), 2, 2, route="sideways")


def test_negative_epsilon_structure_rejected():
    J = np.array([[0.0, -1.0, 0, 0], [1.0, 0, 0, 0], [0, 0, 0, -1.0], [0, 0, 1.0, 0]])
    with pytest.raises(InvalidInputError):
        check_codim1(GenericInvolution(J, -1), Hypersphere(4, 1.0), 2, 2)


def test_generic_involution_passes_identity_checks(rng):
    m = 7
    Q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    s = GenericInvolution(Q @ np.diag([1.0, -1, 1, 1, -1, -1, 1]) @ Q.T, 1)
    assert all(r.passed for r in check_codim1(s, Hypersphere(m, 1.7), 30, 4, seed=1))
    assert all(r.passed for r in check_codim2(s, ProductOfSpheres(2, 3, 1.1, 0.6), 30, 4, seed=1))


def test_xi_fault_fails_unit_length_identity():
    reports = _by_id(check_codim1(S11, Hypersphere(3, 1.0), 100, 8, seed=3, fault=Fault("xi", 1e-4)))
    assert not reports["2.2.iii"].passed


def test_corner_point_has_zero_residual():
    # at (0,0,1): a11 = 1 and xi1 = 0, so u(xi) = 1 - a^2 holds exactly
    sph = Hypersphere(3, 1.0)
    st = induce_at_point(S11, sph, [0, 0, 1])
    assert st.a[0, 0] == 1.0
    X = np.array([[1.0, 0, 0], [0.3, -0.7, 0]])
    assert codim1_residuals(st, X)["2.2.iii"] == 0.0


def test_isometry_without_u_term_fails():
    # g(PX, PY) = g(X, Y) without the u-term is violated on the sphere
    st = induce_at_point(S11, Hypersphere(3, 1.0), [1, 0, 0])
    X = np.array([0.0, 1.0, 0.0])
    PX = st.P(X)
    assert PX @ PX == pytest.approx(0.0, abs=1e-15)
    assert X @ X == 1.0
    assert codim1_residuals(st, X[None])["2.3.iii"] <= 1e-15


def test_mixed_a_forms_agree():
    # u_2(xi_1) and u_1(xi_2) are computed independently yet coincide
    s = BlockSwap(2, 2, (1, -1), (1, 1))
    prod = ProductOfSpheres(2, 2, 1.0, 0.5)
    st = induce_at_point(s, prod, prod.point([0.6, 0.0, 0.0, 0.8, 0.3, 0.4]))
    u_xi1 = st.u(st.xi[0])
    u_xi2 = st.u(st.xi[1])
    assert u_xi1[1] == pytest.approx(u_xi2[0], abs=1e-15)
    res = codim2_residuals(st, np.eye(6)[None, 2])
    assert res["2.6.v"] <= 1e-15 and res["2.6.vi"] <= 1e-15


def test_isometry_on_kernel_of_u():
    # gamma = mu = 0 along X = (0,0,0,1) at (1,0,1,0): u vanishes and P is an isometry there
    prod = ProductOfSpheres(1, 2, 1.0, 1.0)
    st = induce_at_point(S12, prod, [1, 0, 1, 0])
    X = np.array([0.0, 0.0, 0.0, 1.0])
    np.testing.assert_allclose(st.u(X), 0.0, atol=1e-15)
    PX = st.P(X)
    assert PX @ PX == pytest.approx(X @ X, abs=1e-15)
    assert codim2_residuals(st, X[None])["2.7.iv"] <= 1e-15


def test_theorem_chain_passes_and_detects_missing_term():
    s = BlockSwap(2, 2, (1, -1), (1, 1))
    prod = ProductOfSpheres(2, 2, 1.0, 1.0)
    good = check_theorem_chain(s, prod.enclosing_sphere(), prod, 100, seed=9)
    assert good.identity_id == THEOREM_ID and good.passed
    bad = check_theorem_chain(s, prod.enclosing_sphere(), prod, 100, seed=9, include_xi1_perp=False)
    assert not bad.passed


def test_theorem_chain_rejects_bad_radii():
    prod = ProductOfSpheres(1, 2, 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        check_theorem_chain(S12, Hypersphere(4, 1.0), prod, 10)


@pytest.mark.parametrize("component", ["a", "xi", "P", "u"])
@pytest.mark.parametrize("index", [0, 1])
def test_residuals_scale_linearly_with_fault(component, index):
    s = BlockSwap(2, 3, (1, -1), (1, 1, 1))
    prod = ProductOfSpheres(2, 3, 0.5, 2.0)
    deltas = np.logspace(-8, -2, 7)
    table = np.array([
        [r.max_residual for r in check_codim2(s, prod, 20, 4, seed=11, fault=Fault(component, d, index))]
        for d in deltas
    ])
    ratios = table / deltas[:, None]
    live = ratios[0] > 1e-3  # identities the fault actually touches
    assert live.any()
    # first-order: residual / delta is constant across six decades
    spread = ratios[:, live].max(axis=0) / ratios[:, live].min(axis=0)
    assert np.all(spread <= 1.05), dict(zip(np.array(CODIM2_IDS)[live], spread))
    # untouched identities stay at rounding level throughout
    assert np.all(table[:, ~live] <= 1e-12)


@pytest.mark.parametrize("component", ["a", "xi", "P", "u"])
def test_codim1_residuals_scale_linearly(component):
    s = BlockSwap(3, 2, (1, 1, -1), (-1, 1))
    sph = Hypersphere(s.m, 0.5)
    deltas = np.logspace(-8, -2, 7)
    table = np.array([[r.max_residual for r in check_codim1(s, sph, 20, 4, seed=2, fault=Fault(component, d))]
                      for d in deltas])
    ratios = table / deltas[:, None]
    live = ratios[0] > 1e-3
    assert live.any()
    assert np.all(ratios[:, live].max(axis=0) / ratios[:, live].min(axis=0) <= 1.05)


def test_worst_case_reproduces_bitwise():
    s = BlockSwap(2, 3, (1, -1), (-1, 1, -1))
    prod = ProductOfSpheres(2, 3, 0.5, 2.0)
    reports = check_codim2(s, prod, 60, 8, seed=17, case_index=4)
    for r in reports:
        wc = r.worst_case
        assert wc["seed"] == 17 and wc["case_index"] == 4
        again = _by_id(check_codim2(s, prod, seed=wc["seed"], case_index=wc["case_index"],
                                    point_indices=[wc["point_index"]]))[r.identity_id]
        assert again.max_residual == r.max_residual


def test_worst_case_reproduces_for_sphere():
    s = BlockSwap(1, 3, (-1,), (1, 1, -1))
    sph = Hypersphere(s.m, 2.0)
    for r in check_codim1(s, sph, 60, 8, seed=1, case_index=2):
        wc = r.worst_case
        again = _by_id(check_codim1(s, sph, seed=1, case_index=2, point_indices=[wc["point_index"]]))
        assert again[r.identity_id].max_residual == r.max_residual


def test_reports_are_deterministic():
    prod = ProductOfSpheres(1, 3, 0.7, 1.1)
    s = BlockSwap(1, 3, (1,), (1, -1, 1))
    a = [r.to_dict() for r in check_codim2(s, prod, 20, 4, seed=8)]
    b = [r.to_dict() for r in check_codim2(s, prod, 20, 4, seed=8)]
    assert a == b


def test_per_identity_tolerance():
    tol = {i: 1e-10 for i in CODIM1_IDS}
    tol["2.2.i"] = 1e-30
    reports = _by_id(check_codim1(S11, Hypersphere(3, 1.0), 20, 4, tol=tol))
    assert reports["2.2.i"].tolerance == 1e-30
    assert reports["2.2.iv"].tolerance == 1e-10


def test_closed_form_checks():
    s = BlockSwap(2, 2, (1, -1), (-1, -1))
    prod = ProductOfSpheres(2, 2, 2.0, 0.5)
    reports = check_closed_forms(s, prod.enclosing_sphere(), prod, 50, 4, seed=1)
    assert [r.identity_id for r in reports] == list(SPHERE_FORM_IDS + PRODUCT_FORM_IDS)
    assert all(r.passed for r in reports)
    mixed = BlockSwap(2, 2, (1, -1), (1, -1))
    reports = check_closed_forms(mixed, prod.enclosing_sphere(), prod, 10, 4)
    assert [r.identity_id for r in reports] == list(SPHERE_FORM_IDS)


def test_closed_forms_random_small():
    reports = check_closed_forms_random(50, seed=4)
    assert {r.identity_id for r in reports} == set(SPHERE_FORM_IDS + PRODUCT_FORM_IDS)
    assert all(r.passed and r.samples == 50 for r in reports)


SMALL = """
schema_version = 1
seed = 42
n_points = 10
n_tangents = 4

[grid]
p = [1, 2]
q = [2]
nu = ["plus"]
eps = ["plus", "alternating"]
R = [1.0]
split = [[1.0, 1.0]]
"""


def test_full_suite_small_grid():
    report = run_full_suite(parse_config(SMALL))
    assert len(report.cases) == 4 and report.passed
    for case in report.cases:
        ids = [r.identity_id for r in case.reports]
        assert [i for i in ids if i in CODIM1_IDS + CODIM2_IDS] == list(CODIM1_IDS + CODIM2_IDS)
        assert THEOREM_ID in ids
        has_product_forms = len(set(case.descriptor["eps"])) == 1
        assert ("product.a" in ids) == has_product_forms


def test_empty_grid_is_vacuous_pass():
    report = run_full_suite(parse_config("schema_version = 1\nseed = 1\n"))
    assert report.cases == [] and report.passed and report.failures() == []


def test_unreachable_tolerance_fails():
    cfg = parse_config(SMALL + "\n[tolerances]\ndefault = 1e-30\n")
    report = run_full_suite(cfg)
    assert not report.passed
    assert report.failures()
