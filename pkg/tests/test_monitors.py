"""Cross-term coefficients, the functional hierarchy, sandwich bounds,
splitting diagnostics, and the balance-law residual."""

import math

import numpy as np
import pytest

from oldroyd2d.grid import Grid
from oldroyd2d.monitors import (
    CSV_HEADER,
    EnergyReport,
    EtaCoefficients,
    EtaConstraintError,
    balance_residual,
    balance_rows,
    evaluate,
    report_row,
    residual_column,
    splitting_diagnostics,
    splitting_radii,
)
from oldroyd2d.operators import hk_norm, sigma_from_tau, sobolev_norm, tensor_sobolev_norm
from oldroyd2d.params import PhysParams
from oldroyd2d.solver import SimState, StepConfig, new_state, random_state, run, zero_state

UNIT = PhysParams()


class TestEtaCoefficients:
    def test_structural_ratios(self):
        e = EtaCoefficients(0.04)
        assert e.eta2 == pytest.approx(0.01)
        assert e.eta3 == pytest.approx(0.0025)
        assert e.eta4 == pytest.approx(0.0025)  # defaults to eta3

    def test_explicit_eta4(self):
        e = EtaCoefficients(0.04, eta4=0.001)
        assert e.eta4 == 0.001

    def test_positivity(self):
        with pytest.raises(EtaConstraintError):
            EtaCoefficients(0.0)
        with pytest.raises(EtaConstraintError):
            EtaCoefficients(0.01, eta4=-1.0)

    def test_damping_constraint(self):
        EtaCoefficients(0.01).validate_for(UNIT)
        with pytest.raises(EtaConstraintError):
            EtaCoefficients(0.01).validate_for(PhysParams(beta=0.001))

    def test_evaluate_refuses_bad_etas(self):
        s = zero_state(Grid(16), PhysParams(beta=0.001))
        with pytest.raises(EtaConstraintError):
            evaluate(s, EtaCoefficients(0.01))


class TestEvaluate:
    def test_zero_state_all_zero(self):
        rep = evaluate(zero_state(Grid(16), UNIT), EtaCoefficients())
        assert all(v == 0.0 for v in rep.u_norms + rep.tau_norms + rep.H + rep.cross)
        assert rep.lowfreq_mass == 0.0

    def test_pure_stress_state_h1_is_stress_energy(self):
        g = Grid(16)
        tau = np.zeros((3, g.n, g.n), complex)
        tau[0, 1, 2] = 2e-3
        s = new_state(g, UNIT, np.zeros((2, g.n, g.n), complex), tau)
        rep = evaluate(s, EtaCoefficients())
        expected = UNIT.K * hk_norm(g, s.tau, 1, (1.0, 2.0, 1.0)) ** 2
        assert rep.H[0] == pytest.approx(expected, rel=1e-14)
        assert all(c == 0.0 for c in rep.cross)

    def test_equivalence_sandwich_random_states(self):
        for seed in range(5):
            g = Grid(32)
            s = random_state(g, UNIT, h3_norm=0.5, seed=seed)
            etas = EtaCoefficients()
            rep = evaluate(s, etas)
            e3 = (
                UNIT.alpha * hk_norm(g, s.u, 3) ** 2
                + UNIT.K * hk_norm(g, s.tau, 3, (1.0, 2.0, 1.0)) ** 2
            )
            middle = e3 + sum(
                w * c for w, c in zip((etas.eta1, etas.eta2, etas.eta3), rep.cross[:3])
            )
            assert 0.5 * e3 < middle < 2.0 * e3

    def test_h5_sandwich(self):
        from oldroyd2d.operators import FrequencyCutoff, freq_split
        from oldroyd2d.propagator import constants

        g = Grid(32)
        s = random_state(g, UNIT, h3_norm=0.3, seed=12)
        rep = evaluate(s, EtaCoefficients())
        cut = FrequencyCutoff(constants(UNIT).R)
        u_high = freq_split(g, s.u, cut)[1]
        core = (
            UNIT.alpha * sobolev_norm(g, u_high, 3) ** 2
            + UNIT.K * tensor_sobolev_norm(g, s.tau, 3) ** 2
        )
        assert 0.5 * core <= rep.H[4] <= 2.0 * core

    def test_cross_term_cauchy_schwarz_chain(self):
        g = Grid(32)
        s = random_state(g, UNIT, h3_norm=1.0, seed=3)
        rep = evaluate(s, EtaCoefficients())
        sigma = sigma_from_tau(s.stress).data
        for k in (1, 2, 3):
            lhs = abs(rep.cross[k - 1])
            mid = sobolev_norm(g, s.u, k) * sobolev_norm(g, sigma, k - 1)
            rhs = sobolev_norm(g, s.u, k) * tensor_sobolev_norm(g, s.tau, k - 1)
            assert lhs <= mid * (1.0 + 1e-12)
            assert mid <= rhs * (1.0 + 1e-12)

    def test_csv_row_shape(self):
        rep = evaluate(zero_state(Grid(16), UNIT), EtaCoefficients())
        row = report_row(rep)
        assert len(row.split(",")) == len(CSV_HEADER.split(","))


class TestSplitting:
    def test_radius_formulas(self):
        e = EtaCoefficients(0.01)
        g1, g2 = splitting_radii(e, 0.0)
        assert g1**2 == pytest.approx(2400.0)
        assert g2**2 == pytest.approx(64000.0)
        g1_onset, _ = splitting_radii(e, 2399.0)
        assert g1_onset**2 == pytest.approx(1.0)

    def test_onset_flags(self):
        e = EtaCoefficients(0.01)
        g = Grid(16)
        early = splitting_diagnostics(zero_state(g, UNIT), e)
        assert not early.past_g1_onset and not early.past_g2_onset
        assert early.g1_onset_time == pytest.approx(2399.0)
        late_state = SimState(g, UNIT, 64000.0, np.zeros((2, 16, 16), complex),
                              np.zeros((3, 16, 16), complex))
        late = splitting_diagnostics(late_state, e)
        assert late.past_g1_onset and late.past_g2_onset

    def test_lowfreq_mass_zero_state(self):
        d = splitting_diagnostics(zero_state(Grid(16), UNIT), EtaCoefficients())
        assert d.lowfreq_mass == 0.0

    def test_lowfreq_mass_counts_modes_below_g1(self):
        g = Grid(16)
        u = np.zeros((2, 16, 16), complex)
        u[0, 1, 0] = 3.0
        s = SimState(g, UNIT, 1e9, u, np.zeros((3, 16, 16), complex))
        d = splitting_diagnostics(s, EtaCoefficients())
        assert d.g1 < g.k_mag[1, 0]
        assert d.lowfreq_mass == 0.0  # the populated mode sits above g1 by then


class TestBalanceResidual:
    def test_constant_zero_series(self):
        rows = [(0.1 * i, 0.0, 0.0, 0.0, 0.0) for i in range(5)]
        assert balance_residual(rows) == 0.0

    def test_synthetic_damping_series_second_order(self):
        # u = 0 and ||tau||^2 = e^{-2 beta t} solves the balance exactly
        def rows_at(h):
            t = np.arange(0.0, 2.0 + h / 2, h)
            return [(ti, 0.0, math.exp(-2.0 * ti), math.exp(-2.0 * ti), 0.0) for ti in t]

        r1 = balance_residual(rows_at(0.02))
        r2 = balance_residual(rows_at(0.01))
        assert r1 / r2 == pytest.approx(4.0, rel=0.2)

    def test_solver_run_residual_small_and_refining(self):
        # the residual is pure sampling-interval error: O(h^2), about 0.7 h^2
        g = Grid(32)
        s0 = random_state(g, UNIT, h3_norm=1e-2, seed=3)
        samples = run(s0, StepConfig(dt=0.005), T=0.5, sample_every=0.005)
        resid = balance_residual(balance_rows(UNIT, samples))
        assert resid < 1e-4
        halved = run(s0, StepConfig(dt=0.0025), T=0.5, sample_every=0.0025)
        resid_halved = balance_residual(balance_rows(UNIT, halved))
        assert resid / resid_halved == pytest.approx(4.0, rel=0.2)

    def test_refuses_nonuniform_or_short(self):
        with pytest.raises(ValueError):
            balance_residual([(0.0, 1, 1, 1, 0), (0.1, 1, 1, 1, 0)])
        with pytest.raises(ValueError):
            balance_residual(
                [(0.0, 1, 1, 1, 0), (0.1, 1, 1, 1, 0), (0.35, 1, 1, 1, 0)]
            )

    def test_residual_column_fills_interior(self):
        g = Grid(16)
        s0 = random_state(g, UNIT, h3_norm=1e-2, seed=5)
        samples = run(s0, StepConfig(dt=0.01), T=0.1, sample_every=0.01)
        reports = residual_column(UNIT, samples)
        assert math.isnan(reports[0].balance_residual)
        assert all(math.isfinite(r.balance_residual) for r in reports[1:-1])


class TestMonotoneFunctionals:
    def test_small_data_h_functionals_nonincreasing(self):
        g = Grid(32)
        s0 = random_state(g, UNIT, h3_norm=1e-2, seed=1)
        samples = run(s0, StepConfig(dt=0.01), T=5.0, sample_every=0.25)
        for i in range(3):
            series = [rep.H[i] for _, rep in samples]
            assert all(b <= a + 1e-10 for a, b in zip(series, series[1:]))
