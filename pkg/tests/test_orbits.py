import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from kdvorbits.elliptic import ellint_E, ellint_K, jacobi
from kdvorbits.errors import DomainError, InsideWedgeError
from kdvorbits.orbits import (
    OrbitKind,
    classify,
    cnoidal_profile,
    cnoidal_speed,
    constant_trace,
    dk_dV,
    level_curve,
    monodromy_trace,
    uniform_representative,
    winding_from_kc,
)
from kdvorbits.weierstrass import lattice, wp_inverse, zeta

import oracles

M_GRID = [1e-6, 0.05, 0.3, 0.5, 0.7, 0.9, 0.999]


def region_points(m):
    """One interior V per region: below / wedge / band / above."""
    lat = lattice(m)
    return {
        "below": lat.e2 - 0.8,
        "wedge": 0.5 * (lat.e2 + lat.e3),
        "band": 0.5 * (lat.e3 + lat.e1),
        "above": lat.e1 + 1.1,
    }


class TestHolonomyRoutes:
    """The per-edge real formulas must agree with K zeta(a) - eta1 a."""

    @pytest.mark.parametrize("m", [0.05, 0.3, 0.5, 0.9, 0.999])
    def test_trace_matches_zeta_route(self, m):
        lat = lattice(m)
        for V in region_points(m).values():
            a = wp_inverse(V, lat)
            w = lat.K * zeta(a, lat) - lat.eta1 * a
            expected = 2.0 * np.cosh(2.0 * w)
            assert abs(expected.imag) < 1e-9
            assert_allclose(monodromy_trace(m, V), expected.real,
                            rtol=1e-10, atol=1e-10)

    @pytest.mark.parametrize("m,V", [
        (0.3, -1.7), (0.3, 0.25), (0.3, 1.4),
        (0.7, -0.9), (0.7, 0.35), (0.7, 2.0),
        (0.95, -4.0), (0.95, 0.36),
    ])
    def test_trace_matches_floquet_ode(self, m, V):
        K = ellint_K(m)

        def q(x):
            s = jacobi(K * x / math.pi, m).sn
            return 2.0 * K * K / math.pi**2 * (V / 2 - (m + 1) / 3 + m * s * s)

        assert_allclose(monodromy_trace(m, V), oracles.ode_hill_trace(q),
                        rtol=1e-8, atol=1e-8)

    def test_edge_traces_are_exact(self):
        for m in (0.05, 0.5, 0.9):
            lat = lattice(m)
            assert monodromy_trace(m, lat.e2) == -2.0
            assert monodromy_trace(m, lat.e3) == -2.0
            assert monodromy_trace(m, lat.e1) == 2.0

    def test_trace_is_continuous_across_edges(self):
        for m in (0.3, 0.8):
            lat = lattice(m)
            for edge in (lat.e2, lat.e3, lat.e1):
                lo = monodromy_trace(m, edge - 1e-8)
                hi = monodromy_trace(m, edge + 1e-8)
                assert abs(lo - monodromy_trace(m, edge)) < 1e-6
                assert abs(hi - monodromy_trace(m, edge)) < 1e-6

    def test_nonfinite_V_rejected(self):
        for bad in (math.nan, math.inf, -math.inf):
            with pytest.raises(DomainError):
                monodromy_trace(0.5, bad)


class TestUniformRepresentative:
    def test_edge_values(self):
        lat = lattice(0.4)
        for V in (lat.e2, lat.e3):
            rep = uniform_representative(0.4, V)
            assert rep.kc == -1.0 / 24.0
            assert rep.has_rest_frame
        rep = uniform_representative(0.4, lat.e1)
        assert rep.kc == 0.0
        assert rep.has_rest_frame

    def test_wedge_has_no_rest_frame(self):
        rep = uniform_representative(0.5, -0.2)
        assert not rep.has_rest_frame
        assert rep.kc.imag != 0.0
        # Re kc stays in (-1/24 - something, 0); Im kc = -rho/(6 pi)
        rho = -6.0 * math.pi * rep.kc.imag
        assert rho > 0.0
        assert_allclose(rep.kc.real, (rho**2 - math.pi**2 / 4) / (6 * math.pi**2),
                        rtol=1e-14)

    @pytest.mark.parametrize("m", [0.05, 0.3, 0.7, 0.999])
    def test_constant_representative_has_same_trace(self, m):
        # the whole point of kc: the constant potential kc*c lies on the
        # same orbit, so its monodromy trace must agree
        for name, V in region_points(m).items():
            if name == "wedge":
                continue
            rep = uniform_representative(m, V)
            assert rep.kc.imag == 0.0
            assert_allclose(constant_trace(rep.kc.real), monodromy_trace(m, V),
                            rtol=1e-12, atol=1e-12)

    @settings(deadline=None, max_examples=120)
    @given(m=st.floats(1e-5, 0.999), t=st.floats(-3.0, 3.0))
    def test_rest_frame_trace_consistency(self, m, t):
        lat = lattice(m)
        V = lat.e2 + t if t <= 0.0 else lat.e3 + t  # dodge the wedge
        rep = uniform_representative(m, V)
        assert rep.has_rest_frame
        assert_allclose(constant_trace(rep.kc.real), monodromy_trace(m, V),
                        rtol=1e-11, atol=1e-11)

    def test_kc_monotone_in_V_outside_wedge(self):
        # strictly increasing on each side; the two wedge edges share -1/24
        for m in (0.1, 0.6, 0.95):
            lat = lattice(m)
            for grid in (np.linspace(lat.e2 - 5.0, lat.e2, 40),
                         np.linspace(lat.e3, lat.e1 + 5.0, 60)):
                vals = [uniform_representative(m, V).kc.real for V in grid]
                assert np.all(np.diff(vals) > 0.0)

    def test_kc_tends_to_minus_infinity_below(self):
        assert uniform_representative(0.5, -1e4).kc.real < -300.0


class TestClassify:
    def test_reference_points(self):
        # the m = 0.5 section: wedge, parabolic edge, lower exceptional edge
        assert classify(0.5, -0.2) == classify(0.5, -0.2)
        c = classify(0.5, -0.2)
        assert (c.kind, c.winding) == (OrbitKind.HYPERBOLIC, 1)
        c = classify(0.5, 0.5)
        assert (c.kind, c.winding) == (OrbitKind.PARABOLIC, 0)
        c = classify(0.5, -0.5)
        assert (c.kind, c.winding) == (OrbitKind.EXCEPTIONAL, 1)

    def test_band_and_above(self):
        assert classify(0.5, 0.25) == classify(0.5, 0.25)
        assert classify(0.5, 0.25).kind is OrbitKind.ELLIPTIC
        assert classify(0.5, 0.25).winding == 0
        assert classify(0.5, 3.0).kind is OrbitKind.HYPERBOLIC
        assert classify(0.5, 3.0).winding == 0

    def test_below_wedge_windings_increase(self):
        # phi grows without bound as V -> -inf, so n steps through 1,2,3,...
        m = 0.3
        lat = lattice(m)
        seen = set()
        for V in np.linspace(lat.e2 - 1e-6, -60.0, 400):
            seen.add(classify(m, V).winding)
        assert {1, 2, 3, 4}.issubset(seen)

    def test_upper_edge_is_exceptional(self):
        lat = lattice(0.7)
        c = classify(0.7, lat.e3)
        assert (c.kind, c.winding) == (OrbitKind.EXCEPTIONAL, 1)

    def test_m_zero_double_corner(self):
        # at m = 0 the wedge closes; V = -1/3 is the exceptional point
        c = classify(0.0, -1.0 / 3.0)
        assert (c.kind, c.winding) == (OrbitKind.EXCEPTIONAL, 1)

    def test_str_form(self):
        assert str(classify(0.5, -0.2)) == "Hyperbolic(n=1)"
        assert str(classify(0.5, 0.5)) == "Parabolic(n=0)"


class TestWindingFromKc:
    def test_reference_values(self):
        assert winding_from_kc(-1.0 / 6.0) == 2
        assert winding_from_kc(-1.0 / 24.0 - 1e-9) == 1
        assert winding_from_kc(-1.0 / 24.0 + 1e-9) == 0
        assert winding_from_kc(-1.0 / 24.0) == 1
        assert winding_from_kc(0.0) == 0

    def test_exact_squares_snap(self):
        # kc = -n^2/24 sits exactly on a winding step
        for n in range(1, 8):
            assert winding_from_kc(-n * n / 24.0) == n

    def test_positive_kc_rejected(self):
        with pytest.raises(DomainError):
            winding_from_kc(0.3)
        with pytest.raises(DomainError):
            winding_from_kc(math.nan)

    @settings(deadline=None, max_examples=200)
    @given(kc=st.floats(-40.0, 0.0))
    def test_matches_plain_floor_away_from_steps(self, kc):
        x = math.sqrt(-24.0 * kc)
        if abs(x - round(x)) < 1e-9:
            return
        assert winding_from_kc(kc) == math.floor(x)

    def test_agrees_with_classify(self):
        for m in (0.2, 0.6, 0.9):
            lat = lattice(m)
            for V in np.linspace(lat.e2 - 8.0, lat.e2 - 1e-3, 17):
                rep = uniform_representative(m, V)
                assert winding_from_kc(rep.kc.real) == classify(m, V).winding


class TestConstantTrace:
    def test_special_values(self):
        assert constant_trace(0.0) == 2.0
        assert_allclose(constant_trace(-1.0 / 24.0), -2.0, atol=1e-12)
        assert_allclose(constant_trace(-1.0 / 6.0), 2.0, atol=1e-12)  # n = 2

    def test_large_positive(self):
        kc = 0.7
        assert_allclose(constant_trace(kc),
                        2.0 * math.cosh(2.0 * math.pi * math.sqrt(6.0 * kc)),
                        rtol=1e-15)


class TestDkDv:
    @pytest.mark.parametrize("m", [0.05, 0.3, 0.5, 0.9])
    def test_against_finite_differences(self, m):
        lat = lattice(m)
        pts = [lat.e2 - 0.9, lat.e2 - 0.05,
               0.5 * (lat.e3 + lat.e1), lat.e1 - 0.02,
               lat.e1 + 0.02, lat.e1 + 1.5]
        h = 1e-6
        for V in pts:
            fd = (uniform_representative(m, V + h).kc.real
                  - uniform_representative(m, V - h).kc.real) / (2 * h)
            assert_allclose(dk_dV(m, V), fd, rtol=2e-8)

    @pytest.mark.parametrize("m", [0.2, 0.5, 0.8])
    def test_parabolic_edge_limit(self, m):
        lat = lattice(m)
        expected = ellint_E(m) ** 2 / (6.0 * math.pi**2 * (1.0 - m))
        assert_allclose(dk_dV(m, lat.e1), expected, rtol=1e-15)
        # and it really is the limit of the interior derivative
        assert_allclose(dk_dV(m, lat.e1 - 1e-7), expected, rtol=1e-5)
        assert_allclose(dk_dV(m, lat.e1 + 1e-7), expected, rtol=1e-5)

    def test_wedge_edges_diverge(self):
        lat = lattice(0.5)
        assert dk_dV(0.5, lat.e2) == math.inf
        assert dk_dV(0.5, lat.e3) == math.inf

    def test_inside_wedge_raises(self):
        with pytest.raises(InsideWedgeError):
            dk_dV(0.5, -0.2)

    def test_m_zero_slope_is_one_over_24(self):
        # the m -> 0 section is the exact line kc = (V - 2/3)/24
        for V in (-2.0, 0.1, 2.5):
            assert_allclose(dk_dV(0.0, V), 1.0 / 24.0, rtol=1e-12)


class TestLevelCurve:
    def test_reference_inversion(self):
        V = level_curve(-4.0 / 24.0, 0.3, "below_wedge")
        kc = uniform_representative(0.3, V).kc.real
        assert abs(kc + 4.0 / 24.0) <= 1e-9

    @pytest.mark.parametrize("m", [0.0, 0.05, 0.3, 0.9, 0.999])
    def test_round_trip_below(self, m):
        for target in (-0.05, -0.25, -1.3, -6.0):
            V = level_curve(target, m, "below_wedge")
            assert V <= lattice(m).e2
            kc = uniform_representative(m, V).kc.real
            assert abs(kc - target) <= 1e-10 * max(1.0, abs(target))

    @pytest.mark.parametrize("m", [0.0, 0.05, 0.3, 0.9, 0.999])
    def test_round_trip_above(self, m):
        for target in (-0.03, -0.001, 0.02, 0.6, 11.0):
            V = level_curve(target, m, "above_wedge")
            assert V >= lattice(m).e3
            kc = uniform_representative(m, V).kc.real
            assert abs(kc - target) <= 1e-10 * max(1.0, abs(target))

    def test_boundary_target_returns_wedge_edges(self):
        lat = lattice(0.45)
        assert level_curve(-1.0 / 24.0, 0.45, "below_wedge") == lat.e2
        assert level_curve(-1.0 / 24.0, 0.45, "above_wedge") == lat.e3
        assert level_curve(0.0, 0.45, "above_wedge") == lat.e1

    def test_near_boundary_targets_resolve_to_corner(self):
        # kc ~ sqrt(V - corner) there, so 1e-9 away is inside the corner's
        # double-precision resolution; the edge V is the right answer
        V = level_curve(-1.0 / 24.0 - 1e-9, 0.3, "below_wedge")
        assert abs(V - lattice(0.3).e2) < 1e-10

    def test_wrong_side_rejected(self):
        with pytest.raises(DomainError):
            level_curve(-0.01, 0.3, "below_wedge")
        with pytest.raises(DomainError):
            level_curve(-0.1, 0.3, "above_wedge")
        with pytest.raises(DomainError):
            level_curve(-0.1, 0.3, "sideways")

    @settings(deadline=None, max_examples=60)
    @given(m=st.floats(1e-4, 0.999), t=st.floats(-8.0, -0.05))
    def test_random_round_trips_below(self, m, t):
        V = level_curve(t, m, "below_wedge")
        kc = uniform_representative(m, V).kc.real
        assert abs(kc - t) <= 1e-9 * max(1.0, abs(t))

    def test_level_curves_nest_in_m(self):
        # deeper kc targets push V further down, at every m
        for m in (0.1, 0.5, 0.9):
            vs = [level_curve(t, m, "below_wedge") for t in (-0.05, -0.3, -1.0)]
            assert vs[0] > vs[1] > vs[2]


class TestCnoidalProfile:
    def test_matches_closed_form(self):
        m, V, c = 0.7, -1.1, 17.0
        p = cnoidal_profile(m, V, c)
        K = ellint_K(m)
        x = np.linspace(0.0, 2.0 * np.pi, 29)
        s = jacobi(K * x / np.pi, m).sn
        expected = c * K * K / (3 * np.pi**2) * (V / 2 - (m + 1) / 3 + m * s * s)
        assert_allclose(p(x), expected, rtol=1e-13, atol=1e-13)

    def test_period_and_shape(self):
        p = cnoidal_profile(0.5, 0.3, 6.0)
        assert p.period == pytest.approx(2.0 * math.pi)
        assert_allclose(p(0.0), p(2.0 * math.pi), rtol=1e-12)
        # trough at x = 0 (sn vanishes), crest at half period
        assert p(math.pi) > p(0.0)

    def test_mean_value(self):
        m, V, c = 0.6, -0.9, 10.0
        p = cnoidal_profile(m, V, c)
        K, E = ellint_K(m), ellint_E(m)
        expected = c * K * K / (3 * np.pi**2) * (V / 2 - (m + 1) / 3 + (K - E) / K)
        assert_allclose(p.mean(), expected, rtol=1e-12)

    def test_m_zero_is_constant(self):
        p = cnoidal_profile(0.0, 0.5, 12.0)
        x = np.linspace(0.0, 2.0 * np.pi, 11)
        assert_allclose(p(x), 12.0 * (math.pi / 2) ** 2 / (3 * math.pi**2)
                        * (0.25 - 1.0 / 3.0), rtol=1e-12)

    def test_amplitude_scales_with_central_charge(self):
        p1 = cnoidal_profile(0.4, -0.7, 1.0)
        p2 = cnoidal_profile(0.4, -0.7, 5.0)
        x = np.linspace(0.0, 2.0 * np.pi, 7)
        assert_allclose(p2(x), 5.0 * p1(x), rtol=1e-12)

    def test_speed(self):
        m, V, c = 0.8, -1.3, 24.0
        K = ellint_K(m)
        assert_allclose(cnoidal_speed(m, V, c), c * K * K * V / (2 * math.pi**2),
                        rtol=1e-15)
        assert cnoidal_speed(m, 0.0, c) == 0.0
