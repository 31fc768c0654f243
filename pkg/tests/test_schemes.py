import time

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma as G

from oracles import constant_order_scheme1, constant_order_scheme2
from varfdw import schemes
from varfdw.exponent import ConstantExponent, PolyOffsetExponent, SineOffsetExponent, eval_g
from varfdw.fem import Mesh, assemble, l2_norm, ritz_project
from varfdw.schemes import (
    ALPHA0,
    SECOND_ORDER,
    InitialDatum,
    ProblemSpec,
    Source,
    rhs_scheme1,
    rhs_scheme2,
    run,
    step_scheme1,
    step_scheme2,
)
from varfdw.weights import WeightTables, build_tables

SIN = InitialDatum(lambda x: np.sin(np.pi * x), lambda x: np.pi * np.cos(np.pi * x))
BUMP = InitialDatum(lambda x: x ** 2 * (1 - x) ** 2)


def _problem(exponent, u0=SIN, ubar0=BUMP, source=None, kappa=1.0, T=1.0):
    return ProblemSpec(exponent=exponent, domain=(0.0, 1.0), T=T, u0=u0, ubar0=ubar0,
                       source=Source.constant(1.0) if source is None else source, kappa=kappa)


def _setup(pb, J=8, N=16):
    space = assemble(pb.mesh(J))
    return space, build_tables(pb.exponent, N, pb.T / N)


def _numeric_constant_source():
    return Source(spatial=lambda x: np.ones_like(x), temporal=lambda t: np.ones_like(t))


class TestProblemSpec:
    def test_validation(self):
        f = SineOffsetExponent(1.4, 1 / 8)
        with pytest.raises(ValueError):
            _problem(f, kappa=0.0)
        with pytest.raises(ValueError):
            _problem(f, T=-1.0)
        with pytest.raises(ValueError):
            _problem(f, T=2.0)

    def test_source_needs_data(self):
        with pytest.raises(ValueError):
            Source()


class TestRhs1:
    def test_only_initial_value_term(self):
        pb = _problem(SineOffsetExponent(1.4, 1 / 8), ubar0=InitialDatum.zero(), source=Source.zero(), kappa=0.7)
        space, tb = _setup(pb)
        u0c = ritz_project(space, SIN.grad)
        for n in (1, 5, 16):
            t = n * tb.tau
            expect = -0.7 * t ** tb.abar / G(tb.abar + 1) * (space.S @ u0c)
            assert np.allclose(rhs_scheme1(pb, space, tb, n), expect, rtol=1e-13, atol=1e-15)

    def test_constant_source_closed_form_and_numeric(self):
        f = SineOffsetExponent(1.4, 1 / 8)
        closed = _problem(f, u0=InitialDatum.zero(), ubar0=InitialDatum.zero())
        numeric = _problem(f, u0=InitialDatum.zero(), ubar0=InitialDatum.zero(), source=_numeric_constant_source())
        space, tb = _setup(closed)
        ones = space.load(lambda x: np.ones_like(x))
        for n in (1, 7, 16):
            a = rhs_scheme1(closed, space, tb, n)
            assert np.allclose(a, (n * tb.tau) ** tb.abar / G(tb.abar + 1) * ones, rtol=1e-13)
            assert np.allclose(a, rhs_scheme1(numeric, space, tb, n), rtol=1e-8, atol=1e-14)

    def test_small_time_limit(self):
        pb = _problem(SineOffsetExponent(1.4, 1 / 8))
        space = assemble(pb.mesh(8))
        tb = build_tables(pb.exponent, 4, 1e-12)
        ub = space.interpolate(BUMP.value)
        assert np.allclose(rhs_scheme1(pb, space, tb, 1), space.M @ ub, atol=1e-4)

    def test_step_index_checked(self):
        pb = _problem(ConstantExponent(1.5))
        space, tb = _setup(pb)
        with pytest.raises(ValueError):
            rhs_scheme1(pb, space, tb, 0)
        with pytest.raises(ValueError):
            rhs_scheme2(pb, space, tb, 17)

    def test_nodal_fallback_without_gradient(self):
        rough = InitialDatum(lambda x: x ** -0.25)
        pb = _problem(SineOffsetExponent(1.4, 1 / 8), u0=rough, source=Source.zero(), ubar0=InitialDatum.zero())
        space, tb = _setup(pb)
        u0c = space.interpolate(rough.value)
        expect = -(tb.tau ** tb.abar) / G(tb.abar + 1) * (space.S @ u0c)
        assert np.allclose(rhs_scheme1(pb, space, tb, 1), expect, rtol=1e-13)


class TestRhs2:
    def test_velocity_term_average_of_g(self):
        f = PolyOffsetExponent(1.5, 0.5, 3, T=0.5)
        pb = _problem(f, u0=InitialDatum.zero(), source=Source.zero(), T=0.5)
        space, tb = _setup(pb, N=8)
        ub = space.M @ space.interpolate(BUMP.value)
        for n in (1, 4, 8):
            a, b = (n - 1) * tb.tau, n * tb.tau
            gbar = quad(lambda t: eval_g(f, t), a, b, epsabs=1e-14)[0] / tb.tau
            assert np.allclose(rhs_scheme2(pb, space, tb, n), gbar * ub, rtol=1e-9)

    def test_constant_exponent_velocity_term_exact(self):
        pb = _problem(ConstantExponent(1.3), u0=InitialDatum.zero(), source=Source.zero())
        space, tb = _setup(pb)
        ub = space.M @ space.interpolate(BUMP.value)
        assert np.allclose(rhs_scheme2(pb, space, tb, 5), ub, rtol=1e-13)

    def test_constant_source_closed_form_and_numeric(self):
        f = SineOffsetExponent(1.4, 1 / 8)
        closed = _problem(f, u0=InitialDatum.zero(), ubar0=InitialDatum.zero())
        numeric = _problem(f, u0=InitialDatum.zero(), ubar0=InitialDatum.zero(), source=_numeric_constant_source())
        space, tb = _setup(closed)
        ones = space.load(lambda x: np.ones_like(x))
        ab, tau = tb.abar, tb.tau
        for n in (1, 9, 16):
            expect = ((n * tau) ** (ab + 1) - ((n - 1) * tau) ** (ab + 1)) / (tau * G(ab + 2)) * ones
            a = rhs_scheme2(closed, space, tb, n)
            assert np.allclose(a, expect, rtol=1e-13)
            assert np.allclose(a, rhs_scheme2(numeric, space, tb, n), rtol=1e-8)


class TestSources:
    @pytest.mark.parametrize("mu", [0.3, 0.9, 1.5])
    @pytest.mark.parametrize("rate", [1.0, -0.5, 3.0])
    def test_exponential_fractional_integral(self, mu, rate):
        src = Source.exp_decay(lambda x: x, rate=rate)
        for t in (0.1, 1.0, 4.0):
            # (t-s)^(mu-1) is handled by quad's algebraic endpoint weight
            val = quad(lambda s: np.exp(-rate * s), 0, t, weight="alg", wvar=(0, mu - 1))[0] / G(mu)
            assert src.frac_integral(mu, t) == pytest.approx(val, rel=1e-12)
        assert src.frac_integral(mu, 0.0) == 0.0

    def test_general_source_matches_separable(self):
        f = SineOffsetExponent(1.4, 1 / 8)
        sep = Source.exp_decay(lambda x: np.sin(np.pi * x), rate=1.0)
        gen = Source(func=lambda x, t: np.sin(np.pi * x) * np.exp(-t))
        pa = _problem(f, u0=InitialDatum.zero(), ubar0=InitialDatum.zero(), source=sep)
        pb = _problem(f, u0=InitialDatum.zero(), ubar0=InitialDatum.zero(), source=gen)
        errs = []
        for N in (32, 64):
            space, tb = _setup(pa, N=N)
            a, b = rhs_scheme2(pa, space, tb, N), rhs_scheme2(pb, space, tb, N)
            errs.append(np.max(np.abs(a - b)) / np.max(np.abs(a)))
        assert errs[1] < 1e-3
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)


class TestSteppers:
    @pytest.mark.parametrize("scheme", [ALPHA0, SECOND_ORDER])
    def test_zero_data_zero_solution(self, scheme):
        z = InitialDatum.zero()
        pb = _problem(SineOffsetExponent(1.4, 1 / 8), u0=z, ubar0=z, source=Source.zero())
        hist = run(pb, pb.mesh(8), 16, scheme)
        assert np.all(hist.states == 0) and np.all(hist.final == 0)

    @pytest.mark.parametrize("scheme", [ALPHA0, SECOND_ORDER])
    def test_single_step_single_solve(self, scheme):
        pb = _problem(SineOffsetExponent(1.4, 1 / 8))
        hist = run(pb, pb.mesh(8), 1, scheme)
        assert hist.solves == 1 and hist.N == 1

    def test_initial_states(self):
        pb = _problem(SineOffsetExponent(1.4, 1 / 8))
        space = assemble(pb.mesh(8))
        u0c = ritz_project(space, SIN.grad)
        h1 = run(pb, pb.mesh(8), 4, ALPHA0)
        h2 = run(pb, pb.mesh(8), 4, SECOND_ORDER)
        assert np.all(h1.states[0] == 0) and np.allclose(h1.solution(0), u0c)
        assert np.allclose(h2.states[0], u0c) and np.all(h2.offset == 0)

    @pytest.mark.parametrize("scheme, step", [(ALPHA0, step_scheme1), (SECOND_ORDER, step_scheme2)])
    def test_step_functions_agree_with_run(self, scheme, step):
        pb = _problem(SineOffsetExponent(1.85, 1 / 8))
        space, tb = _setup(pb, J=8, N=12)
        hist = run(pb, pb.mesh(8), 12, scheme)
        for n in (1, 2, 7, 12):
            u = step(pb, space, tb, hist.states[:n], n)
            assert np.allclose(u, hist.states[n], rtol=1e-12, atol=1e-15)
        with pytest.raises(ValueError):
            step(pb, space, tb, hist.states[:2], 5)

    @pytest.mark.parametrize("abar", [0.2, 0.5, 0.9])
    def test_constant_order_oracles(self, abar):
        kappa, T, N = 0.7, 1.0, 16
        pb = _problem(ConstantExponent(1 + abar), ubar0=InitialDatum(lambda x: x * (1 - x)), kappa=kappa)
        space = assemble(Mesh(1, (0, 1), 8))
        u0c = ritz_project(space, SIN.grad)
        ub = space.interpolate(pb.ubar0.value)
        fv = space.load(lambda x: np.ones_like(x))
        o1 = constant_order_scheme1(space, abar, kappa, T, N, u0c, ub, fv,
                                    lambda t: t ** abar / G(abar + 1))
        o2 = constant_order_scheme2(space, abar, kappa, T, N, u0c, ub, fv,
                                    lambda a, b: (b ** (abar + 1) - a ** (abar + 1)) / (G(abar + 2) * (b - a)))
        assert np.max(np.abs(run(pb, pb.mesh(8), N, ALPHA0).final - o1)) < 1e-13
        assert np.max(np.abs(run(pb, pb.mesh(8), N, SECOND_ORDER).final - o2)) < 1e-13

    @pytest.mark.parametrize("scheme", [ALPHA0, SECOND_ORDER])
    def test_spatial_symmetry(self, scheme):
        pb = _problem(SineOffsetExponent(1.4, 1 / 8))
        u = run(pb, pb.mesh(16), 32, scheme).final
        assert np.max(np.abs(u - u[::-1])) < 1e-12

    @pytest.mark.parametrize("scheme", [ALPHA0, SECOND_ORDER])
    def test_stability_monitor(self, scheme):
        pb = _problem(SineOffsetExponent(1.85, 1 / 8))
        space = assemble(pb.mesh(16))
        peaks = []
        for N in (16, 32, 64, 128):
            hist = run(pb, pb.mesh(16), N, scheme)
            peaks.append(max(l2_norm(space, hist.solution(n)) for n in range(N + 1)))
        assert max(peaks) < 1.2 * min(peaks)

    def test_spd_guard(self):
        pb = _problem(ConstantExponent(1.5))
        space, tb = _setup(pb, N=4)
        bad = WeightTables(tau=tb.tau, abar=tb.abar, w=np.full(4, -2.5), chi=tb.chi,
                           omega_corr=tb.omega_corr, pi_diag=tb.pi_diag, pi_off=tb.pi_off)
        with pytest.raises(RuntimeError, match="not positive"):
            run(pb, pb.mesh(8), 4, ALPHA0, tables=bad)
        with pytest.raises(RuntimeError, match="not positive"):
            run(pb, pb.mesh(8), 4, SECOND_ORDER, tables=bad)

    def test_failure_reports_step(self, monkeypatch):
        pb = _problem(SineOffsetExponent(1.4, 1 / 8))
        orig = schemes._rhs1

        def flaky(ctx, U, D, n, load):
            if n == 3:
                raise FloatingPointError("boom")
            return orig(ctx, U, D, n, load)

        monkeypatch.setattr(schemes, "_rhs1", flaky)
        with pytest.raises(RuntimeError, match="step 3 of 8"):
            run(pb, pb.mesh(8), 8, ALPHA0)

    def test_unknown_scheme(self):
        pb = _problem(ConstantExponent(1.5))
        with pytest.raises(ValueError):
            run(pb, pb.mesh(8), 4, "euler")

    def test_history_cost_grows_quadratically(self):
        pb = _problem(SineOffsetExponent(1.4, 1 / 8))
        mesh = pb.mesh(16)
        tb = {N: build_tables(pb.exponent, N, pb.T / N) for N in (4096, 8192)}
        times = {}
        for N in (4096, 8192):
            best = np.inf
            for _ in range(2):
                t0 = time.perf_counter()
                run(pb, mesh, N, ALPHA0, tables=tb[N])
                best = min(best, time.perf_counter() - t0)
            times[N] = best
        assert 2.0 < times[8192] / times[4096] < 8.0
