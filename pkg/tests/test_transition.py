import numpy as np
import pytest

from gaitref import BezierCurve, PhaseClock, TransitionCurve, blend, make_transition, splice_tail

from conftest import random_curve, simple_gait
from oracles import de_casteljau_split


class TestPhaseClock:
    def test_validation(self):
        with pytest.raises(ValueError):
            PhaseClock(t0=0.0, t1=0.0, T=0.0, t=0.0)
        with pytest.raises(ValueError):
            PhaseClock(t0=1.0, t1=0.5, T=1.0, t=1.0)  # t1 before t0
        with pytest.raises(ValueError):
            PhaseClock(t0=0.0, t1=1.0, T=1.0, t=1.0)  # t1 at step end
        with pytest.raises(ValueError):
            PhaseClock(t0=0.0, t1=0.5, T=1.0, t=0.2)  # t before t1

    def test_tau_values(self):
        clock = PhaseClock(t0=1.0, t1=1.2, T=0.4, t=1.3)
        assert clock.tau() == pytest.approx(0.75)
        assert clock.tau(1.0) == 0.0
        assert clock.tau_hat(1.2) == 0.0
        assert clock.tau_hat() == pytest.approx(0.5)

    def test_mapping_exact_at_bounds(self):
        rng = np.random.default_rng(30)
        for _ in range(200):
            t0 = float(rng.uniform(-20.0, 20.0))
            T = float(rng.uniform(1e-3, 5.0))
            t1 = t0 + float(rng.uniform(0.0, 0.95)) * T
            clock = PhaseClock(t0=t0, t1=t1, T=T, t=t1)
            assert clock.tau_hat(t1) == 0.0
            assert clock.tau_hat(t0 + T) == 1.0

    def test_tau_hat_strictly_increasing(self):
        clock = PhaseClock(t0=0.0, t1=0.1, T=0.5, t=0.1)
        ts = np.linspace(0.1, 0.6, 50)
        vals = [clock.tau_hat(t) for t in ts]
        assert np.all(np.diff(vals) > 0.0)

    def test_advanced(self):
        clock = PhaseClock.step_start(2.0, 0.4)
        assert clock.advanced(0.02).t == 2.02
        assert clock.advanced(0.02).t1 == 2.0


class TestSpliceTail:
    def test_zero_phase_identity(self):
        rng = np.random.default_rng(31)
        c = random_curve(rng)
        assert splice_tail(c, 0.0) is c

    def test_start_matches_cut_point_exactly(self):
        rng = np.random.default_rng(32)
        for _ in range(10):
            c = random_curve(rng)
            tau1 = float(rng.uniform(0.05, 0.95))
            tail = splice_tail(c, tau1)
            np.testing.assert_array_equal(tail.eval(0.0), c.eval(tau1))

    def test_reparameterization(self):
        rng = np.random.default_rng(33)
        c = random_curve(rng)
        tau1 = 0.4
        tail = splice_tail(c, tau1)
        tol = 1e-10 * (1.0 + np.max(np.abs(c.coeffs)))
        for u in rng.random(100):
            assert np.max(np.abs(tail.eval(u) - c.eval(tau1 + (1 - tau1) * u))) <= tol

    def test_matches_de_casteljau(self):
        rng = np.random.default_rng(34)
        c = random_curve(rng)
        tau1 = 0.62
        tail = splice_tail(c, tau1)
        _, oracle = de_casteljau_split(c.coeffs, tau1)
        assert np.max(np.abs(tail.coeffs - oracle)) < 1e-12

    def test_domain_errors(self):
        c = random_curve(np.random.default_rng(35))
        for tau1 in (1.0, 1.5, -0.1):
            with pytest.raises(ValueError):
                splice_tail(c, tau1)


class TestBlend:
    def test_column_layout_degree7(self):
        a1 = BezierCurve(np.arange(8.0)[None, :])
        a2 = BezierCurve(np.arange(10.0, 18.0)[None, :])
        out = blend(a1, a2)
        np.testing.assert_array_equal(out.coeffs[0], [0, 1, 2, 8, 9, 15, 16, 17])

    def test_identical_inputs_bit_identical(self):
        c = random_curve(np.random.default_rng(36))
        np.testing.assert_array_equal(blend(c, c).coeffs, c.coeffs)

    def test_endpoint_values_copied(self):
        rng = np.random.default_rng(37)
        a1, a2 = random_curve(rng), random_curve(rng)
        out = blend(a1, a2)
        np.testing.assert_array_equal(out.eval(0.0), a1.eval(0.0))
        np.testing.assert_array_equal(out.eval(1.0), a2.eval(1.0))

    def test_c2_continuity_at_boundaries(self):
        rng = np.random.default_rng(38)
        for _ in range(20):
            a1, a2 = random_curve(rng), random_curve(rng)
            out = blend(a1, a2)
            for order in (1, 2):
                ref0 = a1.eval_derivative(0.0, order)
                ref1 = a2.eval_derivative(1.0, order)
                scale0 = 1.0 + np.max(np.abs(ref0))
                scale1 = 1.0 + np.max(np.abs(ref1))
                assert np.max(np.abs(out.eval_derivative(0.0, order) - ref0)) / scale0 <= 1e-9
                assert np.max(np.abs(out.eval_derivative(1.0, order) - ref1)) / scale1 <= 1e-9

    def test_interior_averaging_symmetry(self):
        rng = np.random.default_rng(39)
        a1, a2 = random_curve(rng), random_curve(rng)
        forward = blend(a1, a2).coeffs[:, 3:6]
        backward = blend(a2, a1).coeffs[:, 3:6]
        np.testing.assert_array_equal(forward + backward, a1.coeffs[:, 3:6] + a2.coeffs[:, 3:6])

    def test_higher_degree_interior(self):
        rng = np.random.default_rng(40)
        a1 = BezierCurve(rng.normal(size=(2, 10)))
        a2 = BezierCurve(rng.normal(size=(2, 10)))
        out = blend(a1, a2)
        np.testing.assert_array_equal(out.coeffs[:, :3], a1.coeffs[:, :3])
        np.testing.assert_array_equal(out.coeffs[:, 7:], a2.coeffs[:, 7:])
        np.testing.assert_array_equal(
            out.coeffs[:, 3:7], 0.5 * (a1.coeffs[:, 3:7] + a2.coeffs[:, 3:7])
        )

    def test_low_degree_rejected(self):
        rng = np.random.default_rng(41)
        a = BezierCurve(rng.normal(size=(2, 7)))  # degree 6
        with pytest.raises(ValueError, match="degree"):
            blend(a, a)

    def test_shape_mismatch_rejected(self):
        rng = np.random.default_rng(42)
        with pytest.raises(ValueError, match="shape"):
            blend(BezierCurve(rng.normal(size=(2, 8))), BezierCurve(rng.normal(size=(3, 8))))


class TestMakeTransition:
    def test_same_curve_continues_gait(self):
        rng = np.random.default_rng(43)
        gait = simple_gait(rng.normal(size=(4, 8)), (0.1, 0.0))
        clock = PhaseClock(t0=0.0, t1=0.25 * 0.4, T=0.4, t=0.1)
        trans = make_transition(gait.curve, gait, clock)
        np.testing.assert_array_equal(trans.blended.coeffs, splice_tail(gait.curve, 0.25).coeffs)

    def test_transition_at_stride_start_uses_full_curves(self):
        rng = np.random.default_rng(44)
        current = random_curve(rng, n_rows=4)
        gait = simple_gait(rng.normal(size=(4, 8)), (0.3, 0.0))
        clock = PhaseClock.step_start(0.0, 0.4)
        trans = make_transition(current, gait, clock)
        np.testing.assert_array_equal(trans.source_tail.coeffs, current.coeffs)
        np.testing.assert_array_equal(trans.target_tail.coeffs, gait.curve.coeffs)
        np.testing.assert_array_equal(trans.blended.eval(0.0), current.eval(0.0))
        np.testing.assert_array_equal(trans.blended.eval(1.0), gait.curve.eval(1.0))

    def test_c2_match_with_current_at_start(self):
        rng = np.random.default_rng(45)
        current = random_curve(rng, n_rows=4)
        gait = simple_gait(rng.normal(size=(4, 8)), (0.2, 0.1))
        clock = PhaseClock(t0=0.0, t1=0.12, T=0.4, t=0.12)
        trans = make_transition(current, gait, clock)
        for order in (1, 2):
            ref = trans.source_tail.eval_derivative(0.0, order)
            scale = 1.0 + np.max(np.abs(ref))
            err = np.max(np.abs(trans.blended.eval_derivative(0.0, order) - ref))
            assert err / scale <= 1e-9
        np.testing.assert_array_equal(trans.blended.eval(0.0), trans.source_tail.eval(0.0))

    def test_current_phase_override(self):
        rng = np.random.default_rng(46)
        current = random_curve(rng, n_rows=4)
        gait = simple_gait(rng.normal(size=(4, 8)), (0.2, 0.0))
        clock = PhaseClock(t0=0.0, t1=0.2, T=0.4, t=0.2)
        trans = make_transition(current, gait, clock, current_phase=0.7)
        np.testing.assert_array_equal(
            trans.source_tail.coeffs, splice_tail(current, 0.7).coeffs
        )
        # target still cut at the stride phase
        np.testing.assert_array_equal(
            trans.target_tail.coeffs, splice_tail(gait.curve, 0.5).coeffs
        )

    def test_transition_curve_invariants_enforced(self):
        rng = np.random.default_rng(47)
        a, b = random_curve(rng, n_rows=2), random_curve(rng, n_rows=2)
        clock = PhaseClock.step_start(0.0, 0.4)
        with pytest.raises(ValueError):
            TransitionCurve(
                blended=b, source_tail=a, target_tail=a, clock=clock, target_velocity=(0, 0)
            )
