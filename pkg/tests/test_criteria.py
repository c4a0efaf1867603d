import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from suwitness.algebra import build_operator_set
from suwitness.catalog import StateSpec, catalog_separable_suite, random_guarded_state, realize, two_photon_theta
from suwitness.criteria import (
    BOUNDARY,
    DETECTED,
    NOT_DETECTED,
    CovarianceRecord,
    covariance_record,
    evaluate,
    hur_margin,
    report_from_record,
    srr_margin,
    sym_covariance,
    verify_pt_covariance,
    verify_pt_moments,
    witness_w9,
    witness_w12,
    witness_w14,
)
from suwitness.errors import NonHermitianInput, SpaceMismatch
from suwitness.fock import Operator, build_space, density_from_pure, partial_transpose, pure_state

FIELDS = ("mean_jx", "mean_jy", "var_jx", "var_jy", "cov_xy", "mean_n")


def assert_record(rec, expected, atol=1e-12):
    for key in FIELDS:
        assert getattr(rec, key) == pytest.approx(expected[key], abs=atol), key


class TestSymCovariance:
    def test_variance_on_fock(self, space8, ops8):
        psi = pure_state(space8, [((2, 0), 1)])
        expected = oracle.sym_cov([(1.0, {(2, 0): 1.0})], oracle.JX, oracle.JX)
        assert expected == pytest.approx(0.5)
        assert sym_covariance(psi, ops8.jx, ops8.jx) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("theta", [0.1, 0.7, 1.3, 2.2, 4.0, 5.9])
    def test_family_cross_covariance(self, space8, ops8, theta):
        expected = oracle.sym_cov(oracle.two_photon(theta), oracle.JX, oracle.JY)
        assert expected == pytest.approx(math.sin(2 * theta) / 2, abs=1e-12)
        assert sym_covariance(two_photon_theta(theta, space8), ops8.jx, ops8.jy) == pytest.approx(expected, abs=1e-12)

    def test_symmetric_in_arguments(self, guarded_states, ops8):
        rho = guarded_states[3]
        assert sym_covariance(rho, ops8.jx, ops8.ky) == pytest.approx(sym_covariance(rho, ops8.ky, ops8.jx), abs=1e-14)

    def test_vanishes_on_basis_states(self, space8, ops8):
        for na in range(5):
            for nb in range(5):
                psi = pure_state(space8, [((na, nb), 1)])
                assert oracle.sym_cov([(1.0, {(na, nb): 1.0})], oracle.JX, oracle.JY) == 0
                assert abs(sym_covariance(psi, ops8.jx, ops8.jy)) < 1e-14

    def test_errors(self, space8, ops8):
        psi = pure_state(space8, [((0, 0), 1)])
        a = Operator(np.eye(space8.dim, k=1), "shift", space8)
        with pytest.raises(NonHermitianInput):
            sym_covariance(psi, a, ops8.jx)
        other = build_operator_set(build_space(3, 3))
        with pytest.raises(SpaceMismatch):
            sym_covariance(psi, other.jx, other.jy)


class TestUncertaintyMargins:
    def test_vacuum_saturates_su11_hur(self, space8, ops8):
        vac = pure_state(space8, [((0, 0), 1)])
        mix = [(1.0, {(0, 0): 1.0})]
        assert oracle.sym_cov(mix, oracle.KX, oracle.KX) == pytest.approx(0.25)
        assert sym_covariance(vac, ops8.kx, ops8.kx) == pytest.approx(0.25)
        assert sym_covariance(vac, ops8.ky, ops8.ky) == pytest.approx(0.25)
        assert hur_margin(vac, ops8.kx, ops8.ky) == pytest.approx(0.0, abs=1e-14)

    def test_self_pair(self, guarded_states, ops8):
        rho = guarded_states[0]
        assert srr_margin(rho, ops8.jx, ops8.jx) == pytest.approx(0.0, abs=1e-12)

    def test_srr_holds_before_transposition(self, tp45, ops8):
        assert srr_margin(tp45, ops8.jx, ops8.jy) >= -1e-10
        assert srr_margin(tp45, ops8.kx, ops8.ky) >= -1e-10

    def test_srr_fails_after_transposition(self, tp45, ops8):
        # the uncertainty relation for (Kx, Ky) breaks under partial transposition
        pt = partial_transpose(density_from_pure(tp45))
        assert srr_margin(pt, ops8.kx, ops8.ky) < -0.1

    def test_srr_not_above_hur(self, guarded_states, ops8):
        for rho in guarded_states[:5]:
            for a, b in [(ops8.jx, ops8.jy), (ops8.kx, ops8.ky), (ops8.jz, ops8.kx)]:
                assert srr_margin(rho, a, b) <= hur_margin(rho, a, b) + 1e-15
                assert srr_margin(rho, a, b) >= -1e-10


class TestRecord:
    def test_vacuum(self, space8, ops8):
        rec = covariance_record(pure_state(space8, [((0, 0), 1)]), ops8)
        assert_record(rec, dict.fromkeys(FIELDS, 0.0))
        assert rec.provenance == "exact"

    def test_two_photon(self, tp45, ops8):
        expected = oracle.record(oracle.two_photon(math.pi / 4))
        assert expected["var_jx"] == pytest.approx(0.5)
        assert expected["cov_xy"] == pytest.approx(0.5)
        assert_record(covariance_record(tp45, ops8), expected)

    def test_single_excitation(self, space8, ops8):
        expected = oracle.record(oracle.single_photon_plus())
        assert expected["mean_jx"] == pytest.approx(0.5)
        assert expected["var_jy"] == pytest.approx(0.25)
        psi = pure_state(space8, [((1, 0), 1), ((0, 1), 1)])
        assert_record(covariance_record(psi, ops8), expected)

    def test_matches_oracle_on_random_pure_states(self, space8, ops8, rng):
        for _ in range(5):
            amps = {(na, nb): complex(*rng.normal(size=2)) for na in range(3) for nb in range(3)}
            ket = oracle.normalize(amps)
            psi = pure_state(space8, list(ket.items()))
            assert_record(covariance_record(psi, ops8), oracle.record([(1.0, ket)]))

    def test_covariance_matrix_psd(self, guarded_states, ops8):
        for rho in guarded_states:
            rec = covariance_record(rho, ops8)
            assert np.linalg.det(rec.matrix) >= -1e-10
            assert rec.var_jx >= -1e-10 and rec.var_jy >= -1e-10


class TestWitnesses:
    def test_w9_vacuum(self):
        rec = CovarianceRecord(**dict.fromkeys(FIELDS, 0.0))
        assert witness_w9(rec) == 0
        assert witness_w14(rec) == 0

    def test_w9_single_excitation(self, space8, ops8):
        rec = covariance_record(pure_state(space8, [((1, 0), 1), ((0, 1), 1)]), ops8)
        assert witness_w9(rec) == pytest.approx(-1 / 8, abs=1e-12)

    @pytest.mark.parametrize("theta", np.linspace(0, 2 * math.pi, 17)[:-1])
    def test_family_sweep(self, space8, ops8, theta):
        ref = oracle.record(oracle.two_photon(theta))
        ref_rec = CovarianceRecord(**ref)
        rec = covariance_record(two_photon_theta(theta, space8), ops8)
        assert witness_w9(rec) == pytest.approx(witness_w9(ref_rec), abs=1e-12)
        assert witness_w9(rec) == pytest.approx(0.0, abs=1e-12)
        assert witness_w12(rec) == pytest.approx(-math.sin(2 * theta) ** 2 / 4, abs=1e-12)
        assert witness_w12(rec) == pytest.approx(witness_w12(ref_rec), abs=1e-12)

    def test_w12_reduces_without_cross_term(self):
        rec = CovarianceRecord(0.1, 0.2, 0.3, 0.4, 0.0, 1.5)
        assert witness_w12(rec) == witness_w9(rec)

    def test_w14_at_quarter_pi(self, tp45, ops8):
        rec = covariance_record(tp45, ops8)
        assert np.linalg.det(rec.matrix) == pytest.approx(0, abs=1e-12)
        assert witness_w14(rec) == pytest.approx(-0.25, abs=1e-12)

    def test_tmsv_closed_form(self, ops8):
        from suwitness.fock import build_space as bs

        space = bs(16, 16)
        state = realize(StateSpec("tmsv", {"r": 0.3}, (16, 16)), space)
        s = math.sinh(0.3) ** 2
        expected = ((1 + 2 * s) ** 4 - (1 + 2 * s) ** 2) / 16
        report = evaluate(state, build_operator_set(space))
        assert report.w9 == pytest.approx(expected, abs=1e-10)
        assert set(report.verdicts.values()) == {NOT_DETECTED}


class TestEvaluate:
    def test_two_photon_pattern(self, tp45, ops8):
        rep = evaluate(tp45, ops8)
        assert rep.verdicts == {"w9": BOUNDARY, "w12": DETECTED, "w14": DETECTED}
        assert rep.w12 == pytest.approx(-0.25)
        assert rep.guard_clean

    def test_product_state(self, space8, ops8):
        rep = evaluate(pure_state(space8, [((2, 0), 1)]), ops8)
        assert all(v >= -rep.tol for v in rep.witnesses().values())
        assert DETECTED not in rep.verdicts.values()

    def test_tol_validation(self, tp45, ops8):
        with pytest.raises(ValueError):
            evaluate(tp45, ops8, tol=0)

    def test_boundary_relative_tolerance(self):
        rec = CovarianceRecord(0, 0, 0, 0, 0, 0)
        assert report_from_record(rec).verdicts["w9"] == BOUNDARY
        shifted = replace(rec, var_jx=-1e-8)
        assert report_from_record(shifted).verdicts["w9"] == DETECTED

    def test_tainted_state_reported(self):
        space = build_space(6, 6)
        psi = pure_state(space, [((5, 0), 1)])
        rep = evaluate(psi, build_operator_set(space))
        assert not rep.guard_clean
        assert rep.tail_mass == pytest.approx(1.0)


class TestPtIdentities:
    def test_vacuum(self, space8, ops8):
        vac = density_from_pure(pure_state(space8, [((0, 0), 1)]))
        assert verify_pt_moments(vac, 4).residual == 0
        assert verify_pt_covariance(vac, ops8).residual == pytest.approx(0, abs=1e-15)

    def test_random_states(self, guarded_states, ops8):
        for rho in guarded_states[:5]:
            m = verify_pt_moments(rho, 4)
            assert m.residual <= 1e-10 and not m.tainted
            assert len(m.components) == 70  # monomials with m+n+p+q <= 4
            c = verify_pt_covariance(rho, ops8)
            assert c.passed(1e-10)

    def test_two_photon_monomial(self, tp45):
        rho = density_from_pure(tp45)
        # <a^dag^2 b^dag^2>_PT = <a^dag^2 b^2>_rho = i (oracle)
        ref = oracle.expect(oracle.two_photon(math.pi / 4), [(1.0, ("A", "A", "b", "b"))])
        assert ref == pytest.approx(1j)
        check = verify_pt_moments(rho, 4)
        assert check.components["2002"] <= 1e-12
        from suwitness.fock import annihilation

        a = annihilation(rho.space, "a").matrix
        b = annihilation(rho.space, "b").matrix
        mono = np.linalg.matrix_power(a.T, 2) @ np.linalg.matrix_power(b.T, 2)
        lhs = np.trace(partial_transpose(rho).data @ mono)
        assert lhs == pytest.approx(ref, abs=1e-12)

    def test_two_photon_covariance(self, tp45, ops8):
        rho = density_from_pure(tp45)
        pt = partial_transpose(rho)
        assert sym_covariance(pt, ops8.kx, ops8.ky) == pytest.approx(0.5, abs=1e-12)
        assert verify_pt_covariance(rho, ops8).residual <= 1e-10

    def test_tainted_flag(self):
        space = build_space(5, 5)
        rho = random_guarded_state(np.random.default_rng(0), space, guard=0)
        assert verify_pt_moments(rho, 4).tainted

    def test_rejects_pure(self, tp45):
        with pytest.raises(ValueError):
            verify_pt_moments(tp45, 2)


def test_monotone_and_identity(guarded_states, ops8):
    for rho in guarded_states:
        rec = covariance_record(rho, ops8)
        assert witness_w12(rec) <= witness_w9(rec)
        assert witness_w14(rec) == pytest.approx(witness_w12(rec), abs=1e-10)


def test_separable_soundness(ops8):
    for rho in catalog_separable_suite(20, 99):
        rep = evaluate(rho, ops8)
        assert min(rep.witnesses().values()) >= -1e-9


@settings(max_examples=30, deadline=None)
@given(
    vals=st.tuples(
        st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 4), st.floats(0, 4), st.floats(-2, 2), st.floats(0, 10)
    )
)
def test_record_polynomial_identity(vals):
    rec = CovarianceRecord(*vals)
    assert witness_w14(rec) == pytest.approx(witness_w12(rec), abs=1e-10)
    assert witness_w12(rec) <= witness_w9(rec)
    if rec.cov_xy == 0:
        assert witness_w12(rec) == witness_w9(rec)
    elif abs(rec.cov_xy) > 1e-6:
        assert witness_w12(rec) < witness_w9(rec)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_physicality_property(seed):
    space = build_space(5, 5)
    ops = build_operator_set(space)
    rho = random_guarded_state(np.random.default_rng(seed), space, guard=2)
    for a, b in [(ops.jx, ops.jy), (ops.kx, ops.ky), (ops.jz, ops.n_plus)]:
        assert srr_margin(rho, a, b) >= -1e-10
