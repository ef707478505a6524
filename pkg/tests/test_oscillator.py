import math

import numpy as np
import pytest

from fracvol.errors import EmptyLibrary, InvalidDomain, UnknownType
from fracvol.oscillator import (
    ZERO_STATE,
    MetaActivationLUT,
    OscillatorParams,
    OscillatorState,
    bifurcation_diagram,
    build_lut,
    builtin_library,
    builtin_params,
    generate_meta_activations,
    lut_activation,
    lut_activation_batch,
    max_select,
    meta_activation,
    run_oscillator,
    step,
    stimulus,
)


class TestBuiltinLibrary:
    def test_type1_row(self):
        p = builtin_params(1)
        assert (p.a1, p.a2, p.a3, p.a4) == (0.0, 5.0, 5.0, 1.0)
        assert (p.b1, p.b2, p.b3, p.b4) == (0.0, -1.0, 1.0, 0.0)
        assert p.mu == 5.0
        assert p.k_decay == 500.0

    def test_type5_row(self):
        p = builtin_params(5)
        assert (p.a1, p.a2, p.a3, p.a4) == (-0.9, 0.9, 0.9, -0.9)
        assert (p.b1, p.b2, p.b3, p.b4) == (0.9, -0.9, -0.9, 0.9)
        assert p.mu == 1.0
        assert p.k_decay == 50.0

    def test_paired_rows_differ_only_in_decay(self):
        for lo, hi in ((5, 6), (7, 8)):
            a, b = builtin_params(lo), builtin_params(hi)
            assert b.k_decay == 300.0
            assert a.as_tuple()[:11] == b.as_tuple()[:11]

    def test_common_settings(self):
        lib = builtin_library()
        assert len(lib) == 10
        assert [p.label for p in lib] == [f"T{i}" for i in range(1, 11)]
        assert all(p.e_ratio == 0.001 for p in lib)
        assert all(p.xi_e == 0.0 and p.xi_i == 0.0 for p in lib)
        assert all(p.mu == 1.0 for p in lib if p.label != "T1")

    def test_unknown_type(self):
        with pytest.raises(UnknownType):
            builtin_params(11)
        with pytest.raises(UnknownType):
            builtin_params(0)


class TestDynamics:
    def test_stimulus(self):
        p = builtin_params(2)
        assert stimulus(0.0, p) == 0.0
        assert stimulus(1.0, p) == pytest.approx(1.0 + 0.001 * math.tanh(1.0),
                                                 abs=1e-15)

    def test_step_hand_evaluated(self):
        p = OscillatorParams(a1=0.2, a2=0.5, a3=0.3, a4=1.0,
                             b1=-0.1, b2=0.4, b3=0.6, b4=0.5,
                             mu=2.0, k_decay=0.1, e_ratio=0.0)
        st = OscillatorState(E=0.5, I=-0.3, LORS=0.2, Omega=0.0)
        S = 0.3
        got = step(st, p, S)
        e = math.tanh(2.0 * (0.2 * 0.2 + 0.5 * 0.5 - 0.3 * -0.3 + 1.0 * 0.3))
        i = math.tanh(2.0 * (-0.1 * 0.2 - 0.4 * 0.5 - 0.6 * -0.3 + 0.5 * 0.3))
        omega = math.tanh(2.0 * 0.3)
        assert got.E == pytest.approx(e, abs=1e-15)
        assert got.I == pytest.approx(i, abs=1e-15)
        assert got.Omega == pytest.approx(omega, abs=1e-15)
        assert got.LORS == pytest.approx(
            (e - i) * math.exp(-0.1 * 0.09) + omega, abs=1e-15
        )

    def test_update_is_simultaneous(self):
        # I' must read the pre-step E, not the freshly computed one
        p = OscillatorParams(a1=0, a2=0, a3=0, a4=1.0,
                             b1=0, b2=1.0, b3=0, b4=0,
                             mu=1.0, k_decay=0.0, e_ratio=0.0)
        st = OscillatorState(E=0.9, I=0.0, LORS=0.0, Omega=0.0)
        got = step(st, p, 2.0)
        assert got.I == pytest.approx(math.tanh(-0.9), abs=1e-15)
        assert got.I != pytest.approx(math.tanh(-got.E), abs=1e-6)

    def test_zero_input_zero_trajectory(self):
        for t in (1, 4, 9):
            traj = run_oscillator(0.0, builtin_params(t), n_steps=20)
            assert np.all(traj.lors == 0.0)

    def test_trajectory_length_and_init(self):
        traj = run_oscillator(0.5, builtin_params(3), n_steps=100)
        assert len(traj.states) == 101
        assert traj.states[0] == ZERO_STATE

    def test_exact_negation(self):
        for t in (1, 2, 5, 9):
            p = builtin_params(t)
            pos = run_oscillator(0.37, p).lors
            neg = run_oscillator(-0.37, p).lors
            assert np.array_equal(pos, -neg)

    def test_output_bound(self):
        # |LORS| <= |E'-I'|*exp(...) + |Omega| <= 2 + 1
        rng = np.random.default_rng(0)
        for t in range(1, 11):
            p = builtin_params(t)
            for x in rng.uniform(-2, 2, 5):
                assert np.abs(run_oscillator(x, p).lors).max() <= 3.0

    def test_bad_step_count(self):
        with pytest.raises(ValueError):
            run_oscillator(0.1, builtin_params(1), n_steps=0)


class TestMetaActivation:
    def test_zero_input_all_types(self):
        acts = generate_meta_activations(0.0)
        assert acts.shape == (10,)
        assert np.all(acts == 0.0)

    def test_is_max_over_trajectory(self):
        p = builtin_params(4)
        traj = run_oscillator(0.6, p, n_steps=100)
        assert meta_activation(0.6, p) == traj.lors[1:].max()

    def test_saturated_inputs_track_omega(self):
        # damping kills (E'-I') once |S| >= 1, leaving tanh(mu*S)
        for t in range(1, 11):
            p = builtin_params(t)
            for x in (1.0, 1.5, 2.0, -1.0, -2.0):
                expect = math.tanh(p.mu * stimulus(x, p))
                assert meta_activation(x, p) == pytest.approx(expect, abs=1e-12)

    def test_type2_reference_point(self):
        assert meta_activation(1.0, builtin_params(2)) == pytest.approx(
            0.7622, abs=1e-3
        )

    def test_library_order(self):
        acts = generate_meta_activations(0.8)
        for idx, t in enumerate(range(1, 11)):
            assert acts[idx] == meta_activation(0.8, builtin_params(t))

    def test_max_select(self):
        assert max_select([0.2, -1.0, 0.7]) == 0.7
        acts = generate_meta_activations(0.8)
        assert max_select(acts) == acts.max()

    def test_empty_library(self):
        with pytest.raises(EmptyLibrary):
            generate_meta_activations(0.5, library=[])
        with pytest.raises(EmptyLibrary):
            max_select([])

    def test_deterministic(self):
        a = generate_meta_activations(0.4)
        b = generate_meta_activations(0.4)
        assert np.array_equal(a, b)


class TestLut:
    def test_envelope_is_rowwise_max(self):
        lut = build_lut(x_lo=-1.0, x_hi=1.0, n_knots=41)
        assert np.array_equal(lut.envelope_values, lut.per_type_values.max(axis=0))
        assert lut.per_type_values.shape == (10, 41)
        assert lut.labels == tuple(f"T{i}" for i in range(1, 11))

    def test_knot_values_match_meta_activation(self):
        lib = [builtin_params(2), builtin_params(9)]
        lut = build_lut(lib, x_lo=-1.0, x_hi=1.0, n_knots=21)
        for j, x in enumerate(lut.knots):
            assert lut.per_type_values[0, j] == meta_activation(x, lib[0])
            assert lut.per_type_values[1, j] == meta_activation(x, lib[1])

    def test_exact_knot_returns_stored_value(self):
        lut = build_lut(x_lo=-1.0, x_hi=1.0, n_knots=41)
        for j in range(41):
            value, _ = lut_activation(lut, float(lut.knots[j]))
            assert value == lut.envelope_values[j]

    def test_knot_slope_is_right_interval(self):
        lut = build_lut(x_lo=-1.0, x_hi=1.0, n_knots=41)
        _, slope = lut_activation(lut, float(lut.knots[5]))
        assert slope == lut.envelope_slopes[5]

    def test_interior_linear_interpolation(self):
        lut = build_lut(x_lo=-1.0, x_hi=1.0, n_knots=41)
        x = 0.5 * (lut.knots[7] + lut.knots[8])
        value, slope = lut_activation(lut, float(x))
        expect = np.interp(x, lut.knots, lut.envelope_values)
        assert value == pytest.approx(expect, rel=1e-12)
        assert slope == lut.envelope_slopes[7]

    def test_clamping(self):
        lut = build_lut(x_lo=-1.0, x_hi=1.0, n_knots=41)
        lo_v, lo_s = lut_activation(lut, -5.0)
        hi_v, hi_s = lut_activation(lut, 5.0)
        assert (lo_v, lo_s) == (lut.envelope_values[0], 0.0)
        assert (hi_v, hi_s) == (lut.envelope_values[-1], 0.0)
        # the last knot has no right interval, so it clamps too
        v, s = lut_activation(lut, 1.0)
        assert (v, s) == (lut.envelope_values[-1], 0.0)

    def test_batch_matches_scalar(self):
        lut = build_lut(x_lo=-1.0, x_hi=1.0, n_knots=41)
        rng = np.random.default_rng(6)
        xs = np.concatenate([
            rng.uniform(-1.5, 1.5, 200),
            lut.knots[::5],
            [-1.0, 1.0, 0.0],
        ])
        values, slopes = lut_activation_batch(lut, xs)
        for x, v, s in zip(xs, values, slopes):
            sv, ss = lut_activation(lut, float(x))
            assert v == sv
            assert s == ss

    def test_identity_table_is_identity_map(self):
        knots = np.linspace(-2.0, 2.0, 101)
        lut = MetaActivationLUT.from_samples(knots, knots[None, :])
        xs = np.random.default_rng(9).uniform(-2.0, 2.0, 500)
        values, slopes = lut_activation_batch(lut, xs)
        inside = xs < 2.0
        assert np.array_equal(values[inside], xs[inside])
        assert np.all(slopes[inside] == 1.0)

    def test_invalid_domains(self):
        with pytest.raises(InvalidDomain):
            build_lut(x_lo=1.0, x_hi=-1.0)
        with pytest.raises(InvalidDomain):
            build_lut(x_lo=0.0, x_hi=0.0)
        with pytest.raises(InvalidDomain):
            build_lut(x_lo=-1.0, x_hi=1.0, n_knots=1)
        with pytest.raises(InvalidDomain):
            MetaActivationLUT.from_samples([0.0, 0.0, 1.0], np.zeros((1, 3)))
        with pytest.raises(InvalidDomain):
            MetaActivationLUT.from_samples([0.0, 1.0], np.zeros((1, 3)))

    def test_empty_library(self):
        with pytest.raises(EmptyLibrary):
            build_lut(library=[])

    def test_rebuild_is_bitwise_identical(self):
        a = build_lut(x_lo=-0.5, x_hi=0.5, n_knots=11)
        b = build_lut(x_lo=-0.5, x_hi=0.5, n_knots=11)
        assert np.array_equal(a.envelope_values, b.envelope_values)
        assert np.array_equal(a.per_type_values, b.per_type_values)


class TestBifurcation:
    def test_shape_and_grouping(self):
        grid = [0.1, 0.2, 0.3]
        pts = bifurcation_diagram(builtin_params(2), grid, n_steps=60, n_discard=50)
        assert pts.shape == (30, 2)
        np.testing.assert_array_equal(pts[:10, 0], 0.1)
        np.testing.assert_array_equal(pts[10:20, 0], 0.2)

    def test_chaotic_band_spreads(self):
        pts = bifurcation_diagram(builtin_params(1), [0.02])
        vals = pts[:, 1]
        assert len(np.unique(np.round(vals, 9))) > 10
        assert vals.max() - vals.min() > 0.3

    def test_saturated_wings_collapse(self):
        p = builtin_params(2)
        for x in (1.0, 1.5, -1.2):
            vals = bifurcation_diagram(p, [x])[:, 1]
            assert vals.max() == vals.min()
            assert vals[0] == pytest.approx(math.tanh(p.mu * stimulus(x, p)),
                                            abs=1e-12)

    def test_point_set_odd_symmetry(self):
        grid = np.linspace(-1.0, 1.0, 41)
        pts = bifurcation_diagram(builtin_params(9), grid)
        as_set = {(round(i, 10), round(v, 10)) for i, v in pts}
        mirrored = {(round(-i, 10), round(-v, 10)) for i, v in pts}
        assert as_set == mirrored

    def test_bounded_outputs(self):
        pts = bifurcation_diagram(builtin_params(9), np.linspace(-1, 1, 51))
        assert np.abs(pts[:, 1]).max() <= 3.0

    def test_discard_validation(self):
        with pytest.raises(ValueError):
            bifurcation_diagram(builtin_params(1), [0.1], n_steps=50, n_discard=50)
