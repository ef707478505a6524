"""End-to-end acceptance gate.

One test per numbered criterion; each prints a single pass/fail line
(visible with -s) naming the measured quantity. Criterion 6's envelope
error bound is structurally unattainable for this activation family and is
kept as a strict expected failure; see the companion slope test, which
holds.
"""

import math
import time

import numpy as np
import pytest

from fracvol import backend
from fracvol.forecaster import (
    ModelSpec,
    SupervisedDataset,
    TrainedModel,
    _default_lut,
    _init_weights,
    metrics_from_predictions,
    network_gradients,
    predict,
    run_ablation,
    train,
)
from fracvol.fractal import (
    FractalConfig,
    default_scale_grid,
    directional_fluctuations,
    mf_adcca,
    rolling_hurst_features,
    rolling_window_count,
    segment_fluctuation,
)
from fracvol.market import (
    DailySeries,
    IntradayDay,
    MinMaxScaler,
    bipower_variation,
    minmax_apply,
    minmax_fit,
    minmax_inverse,
    realized_volatility,
    volatility_increment,
)
from fracvol.oscillator import (
    builtin_library,
    builtin_params,
    build_lut,
    generate_meta_activations,
    lut_activation_batch,
    meta_activation,
)
from fracvol.synthetic import gen_asymmetric_vol, gen_fgn, gen_garch_intraday


def report(number, ok, detail):
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_hurst_recovery():
    cfg = FractalConfig(scales=default_scale_grid(8192, s_max=512))
    n_seeds = 20
    worst_bias = 0.0
    t0 = time.monotonic()
    for h_true in (0.3, 0.5, 0.7):
        ests = []
        for seed in range(n_seeds):
            x = gen_fgn(h_true, 8192, seed)
            ests.append(mf_adcca(x, x, cfg).h_overall)
        bias = abs(float(np.mean(ests)) - h_true)
        worst_bias = max(worst_bias, bias)
        assert bias <= 0.08, f"H={h_true}: mean bias {bias:.4f}"
    per_seed = (time.monotonic() - t0) / (3 * n_seeds)
    ok = worst_bias <= 0.08 and per_seed < 10.0
    report(1, ok, f"worst mean bias {worst_bias:.4f} (<=0.08), "
                  f"{per_seed:.3f} s/seed (<10)")
    assert per_seed < 10.0


def reference_nonoverlapping_rows(rx, ry, scales, m=2, min_seg=4):
    """Independent plain (non-overlapping) directional MF-ADCCA.

    Shares only the single-segment fluctuation primitive with the package;
    profiles, segmentation, trend classification, and aggregation are all
    recomputed from scratch here.
    """
    px = np.cumsum(rx - rx.mean())
    py = np.cumsum(ry - ry.mean())
    t_template = {}
    rows = []
    for s in scales:
        n_seg = (rx.size - s) // s + 1
        f2 = np.empty(n_seg)
        beta = np.empty(n_seg)
        t = t_template.setdefault(s, np.arange(s, dtype=np.float64))
        for j in range(n_seg):
            lo = j * s
            f2[j] = segment_fluctuation(px[lo:lo + s], py[lo:lo + s], m)
            beta[j] = np.polyfit(t, rx[lo:lo + s], 1)[0]
        pos = beta > 0.0
        neg = beta < 0.0

        def agg(vals):
            return float(np.mean(vals) ** 0.5)

        f_all = agg(f2)
        f_pos = agg(f2[pos]) if int(pos.sum()) >= min_seg else None
        f_neg = agg(f2[neg]) if int(neg.sum()) >= min_seg else None
        rows.append((s, f_all, f_pos, f_neg, int(pos.sum()), int(neg.sum())))
    return rows


def test_criterion_2_nonoverlapping_equivalence():
    scales = (16, 32, 64, 128)
    cfg = FractalConfig(overlap_ratio=0.0, scales=scales)
    n_checked = 0
    for seed in range(100, 105):
        rx = gen_fgn(0.55, 1024, seed)
        ry = gen_fgn(0.65, 1024, seed + 7000)
        px = np.cumsum(rx - rx.mean())
        py = np.cumsum(ry - ry.mean())
        expected = reference_nonoverlapping_rows(rx, ry, scales)
        for s, f_all, f_pos, f_neg, n_pos, n_neg in expected:
            row = directional_fluctuations(px, py, rx, cfg, s)
            assert row.f_all == f_all, f"seed {seed} scale {s}: f_all"
            assert row.f_pos == f_pos, f"seed {seed} scale {s}: f_pos"
            assert row.f_neg == f_neg, f"seed {seed} scale {s}: f_neg"
            assert (row.n_pos, row.n_neg) == (n_pos, n_neg)
            n_checked += 1
    report(2, True, f"{n_checked} fluctuation rows bitwise equal to the "
                    "independent non-overlapping reference")


def test_criterion_3_overlap_stabilizes():
    scales = default_scale_grid(2048, s_max=256)
    cfg_disjoint = FractalConfig(overlap_ratio=0.0, scales=scales)
    cfg_overlap = FractalConfig(overlap_ratio=1.0 / 3.0, scales=scales)
    h_disjoint, h_overlap = [], []
    for seed in range(1000, 1050):
        x = gen_fgn(0.6, 2048, seed)
        h_disjoint.append(mf_adcca(x, x, cfg_disjoint).h_overall)
        h_overlap.append(mf_adcca(x, x, cfg_overlap).h_overall)
    var_d = float(np.var(h_disjoint))
    var_o = float(np.var(h_overlap))
    ok = var_o <= var_d
    report(3, ok, f"var(rho=1/3) {var_o:.3e} <= var(rho=0) {var_d:.3e} "
                  f"(ratio {var_o / var_d:.3f})")
    assert ok


def test_criterion_4_asymmetry_oracle():
    cfg = FractalConfig(scales=default_scale_grid(8192, s_max=512))
    diffs_amp2 = []
    diffs_amp1 = []
    for seed in range(50):
        rx, ry = gen_asymmetric_vol(0.6, 2.0, 8192, seed)
        t = mf_adcca(rx, ry, cfg)
        diffs_amp2.append(t.h_negative - t.h_positive)
        rx, ry = gen_asymmetric_vol(0.6, 1.0, 8192, seed)
        t = mf_adcca(rx, ry, cfg)
        diffs_amp1.append(t.h_negative - t.h_positive)
    consistency = float(np.mean(np.array(diffs_amp2) > 0.0))
    null_gap = float(np.mean(np.abs(diffs_amp1)))
    ok = consistency >= 0.8 and null_gap < 0.05
    report(4, ok, f"amp=2 sign consistency {consistency:.0%} (>=80%), "
                  f"amp=1 mean |dH| {null_gap:.4f} (<0.05)")
    assert consistency >= 0.8
    assert null_gap < 0.05


def test_criterion_5_oscillator_exactness():
    zero = generate_meta_activations(0.0)
    assert np.all(zero == 0.0), "f(0) must be exactly zero"

    rng = np.random.Generator(np.random.Philox(key=2024))
    xs = rng.uniform(-2.0, 2.0, 1000)
    worst_odd = 0.0
    worst_bound = 0.0
    for p in builtin_library():
        pos = backend.lors_batch(xs, *p.as_tuple(), 100, 0., 0., 0., 0.)[2]
        neg = backend.lors_batch(-xs, *p.as_tuple(), 100, 0., 0., 0., 0.)[2]
        worst_odd = max(worst_odd, float(np.abs(pos + neg).max()))
        worst_bound = max(worst_bound, float(np.abs(pos).max()))
    assert worst_odd <= 1e-12
    assert worst_bound <= 3.0

    t2_sat = meta_activation(1.0, builtin_params(2))
    assert t2_sat == pytest.approx(0.7622, abs=1e-3)
    report(5, True, f"f(0)=0 exact, odd symmetry {worst_odd:.1e} (<=1e-12), "
                    f"|traj| max {worst_bound:.3f} (<=3), "
                    f"f_T2(1)={t2_sat:.6f} (0.7622 +/- 1e-3)")


def _exact_max_select(xs, chunk=10000):
    out = np.empty(xs.size)
    library = builtin_library()
    for lo in range(0, xs.size, chunk):
        block = xs[lo:lo + chunk]
        best = np.full(block.size, -np.inf)
        for p in library:
            lt = backend.lors_batch(block, *p.as_tuple(), 100, 0., 0., 0., 0.)[2]
            best = np.maximum(best, lt[1:].max(axis=0))
        out[lo:lo + chunk] = best
    return out


@pytest.mark.xfail(
    strict=True,
    reason="the exact winner-takes-all surface jumps ~1.07 inside the "
    "origin-adjacent knot interval and ~0.065 inside chaotic-onset "
    "intervals, so no 4001-knot piecewise-linear table can stay within "
    "0.02 everywhere; measured and documented rather than loosened",
)
def test_criterion_6_lut_envelope_error_bound():
    lut = build_lut()
    xs = np.random.Generator(np.random.Philox(key=12345)).uniform(-2., 2., 100000)
    approx = lut_activation_batch(lut, xs)[0]
    exact = _exact_max_select(xs)
    max_err = float(np.abs(approx - exact).max())
    report("6 (envelope value bound)", max_err <= 0.02,
           f"max |LUT - exact Max-Select| = {max_err:.4f} over 1e5 points "
           "(bound 0.02; expected failure)")
    assert max_err <= 0.02


def test_criterion_6_lut_slope_matches_finite_difference():
    lut = build_lut()
    rng = np.random.Generator(np.random.Philox(key=54321))
    xs = rng.uniform(-2.0, 2.0, 20000)
    step = 1e-6
    # keep the centered stencil strictly inside one knot interval
    dist = np.abs(xs[:, None] - lut.knots[None, :]).min(axis=1)
    xs = xs[(dist > 10.0 * step) & (np.abs(xs) < 2.0 - 10.0 * step)]
    assert xs.size > 10000
    _, slopes = lut_activation_batch(lut, xs)
    up = lut_activation_batch(lut, xs + step)[0]
    dn = lut_activation_batch(lut, xs - step)[0]
    fd = (up - dn) / (2.0 * step)
    err = np.abs(fd - slopes)
    # a 1e-6 stencil on O(1) values cannot resolve derivatives below
    # ulp(value)/step ~ 1e-10, so the saturation wings (slopes ~4e-8) get
    # the standard gradient-check floor; resolvable slopes are also held
    # to the unfloored relative bound
    floored = float(
        (err / np.maximum.reduce([np.abs(fd), np.abs(slopes),
                                  np.ones_like(fd)])).max()
    )
    resolvable = np.abs(slopes) >= 1e-4
    assert resolvable.sum() > 1000
    pure = float((err[resolvable] / np.abs(slopes[resolvable])).max())
    ok = floored <= 1e-4 and pure <= 1e-4
    report("6 (slope vs finite difference)", ok,
           f"floored rel err {floored:.2e}, rel err on resolvable slopes "
           f"{pure:.2e} over {xs.size} off-knot points (<=1e-4)")
    assert ok


def test_criterion_7_market_math():
    day = IntradayDay(date="d", returns=[1.0, -2.0, 3.0])
    assert realized_volatility(day) == 14.0
    assert bipower_variation(day) == pytest.approx(4.0 * math.pi, abs=1e-12)

    rng = np.random.default_rng(77)
    bpv_vals = np.exp(rng.normal(size=100))
    series = DailySeries(
        dates=np.datetime64("2020-01-01") + np.arange(100), values=bpv_vals
    )
    v = volatility_increment(series)
    telescoped = abs(
        v.values.sum() - 0.5 * (math.log(bpv_vals[-1]) - math.log(bpv_vals[0]))
    )
    assert telescoped <= 1e-12

    train_rows = rng.normal(size=(50, 4)) * [1.0, 10.0, 0.1, 100.0]
    scaler = minmax_fit(train_rows)
    probe = rng.normal(size=(20, 4)) * [1.0, 10.0, 0.1, 100.0]
    round_trip = float(
        np.abs(minmax_inverse(scaler, minmax_apply(scaler, probe)) - probe).max()
    )
    assert round_trip <= 1e-12

    test_rows = rng.normal(size=(20, 4)) * 1e6
    before_min = scaler.x_min.copy()
    before_map = minmax_apply(scaler, probe).copy()
    test_rows[:] = -test_rows * 3.0  # mutate held-out rows
    refit = minmax_fit(train_rows)
    assert np.array_equal(refit.x_min, before_min)
    assert np.array_equal(minmax_apply(refit, probe), before_map)
    report(7, True, f"RV=14 exact, BPV=4pi, telescoping {telescoped:.1e}, "
                    f"round-trip {round_trip:.1e}, scaler immune to test rows")


def _linear_dataset(n=128, seed=42):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 2.0, (n, 3))
    y = x @ np.array([1.5, -2.0, 0.5]) + 2.0
    return SupervisedDataset(
        inputs=x, targets=y,
        target_dates=np.datetime64("2020-01-01") + np.arange(n),
        train=slice(0, n), val=slice(n, n), test=slice(n, n),
        feature_names=("a", "b", "c"), look_back=1,
    )


def test_criterion_8_forecaster_integrity():
    # (a) analytic lut-activation gradients vs central finite differences
    lut = _default_lut()
    weights = _init_weights([3, 8, 1], seed=3)
    rng = np.random.Generator(np.random.Philox(key=20))
    x = rng.uniform(-1.0, 1.0, (16, 3))
    y = rng.uniform(0.5, 1.5, 16)
    z = x @ weights[0] + weights[1]
    assert np.abs(z[..., None] - lut.knots).min() > 5e-6
    model = TrainedModel(
        weights=weights, spec=ModelSpec(hidden=(8,), activation="coc_lut"),
        scaler=MinMaxScaler(np.zeros(3), np.ones(3)), lut=lut,
    )
    grads, _ = network_gradients(model, x, y)
    step = 1e-7
    worst = 0.0
    for j, w in enumerate(weights):
        it = np.nditer(w, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = w[idx]
            w[idx] = orig + step
            _, up = network_gradients(model, x, y)
            w[idx] = orig - step
            _, dn = network_gradients(model, x, y)
            w[idx] = orig
            fd = (up - dn) / (2.0 * step)
            worst = max(worst, abs(fd - grads[j][idx])
                        / max(abs(fd), abs(grads[j][idx]), 1e-8))
    assert worst <= 1e-3

    # (b) convex single-neuron convergence
    spec = ModelSpec(hidden=(), learning_rate=0.2, batch_size=32,
                     epochs=200, seed=0)
    fitted = train(_linear_dataset(), spec)
    final_mse = fitted.train_trace[-1]
    assert final_mse < 1e-6

    # (c) metric fixed points
    perfect = metrics_from_predictions([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert (perfect.mse, perfect.mae, perfect.r2, perfect.qlike) == (0, 0, 1, 0)
    qlike = metrics_from_predictions([2.0], [1.0]).qlike
    assert abs(qlike - (2.0 - math.log(2.0) - 1.0)) <= 1e-12

    # (d) byte-identical repeat runs
    ds = _linear_dataset()
    spec2 = ModelSpec(hidden=(8,), epochs=5, seed=11)
    a = train(ds, spec2)
    b = train(ds, spec2)
    assert all(wa.tobytes() == wb.tobytes()
               for wa, wb in zip(a.weights, b.weights))
    assert predict(a, ds.inputs).tobytes() == predict(b, ds.inputs).tobytes()
    report(8, True, f"grad check {worst:.1e} (<=1e-3), convergence MSE "
                    f"{final_mse:.1e} (<1e-6), metric fixed points exact, "
                    "repeat runs byte-identical")


def test_criterion_9_ablation_smoke():
    t0 = time.monotonic()
    days = gen_garch_intraday(0.10, 0.05, 0.85, 2000, 39, 0)
    dates = np.array([d.date for d in days], dtype="datetime64[D]")
    rv = np.array([realized_volatility(d) for d in days])
    bpv = np.array([bipower_variation(d) for d in days])
    r = np.array([float(d.returns.sum()) for d in days])
    v = volatility_increment(DailySeries(dates=dates, values=bpv)).values

    base = {
        "rv": DailySeries(dates=dates, values=rv),
        "r": DailySeries(dates=dates, values=r),
        "v": DailySeries(dates=dates[1:], values=v),
    }
    h, hp, hn = rolling_hurst_features(r[1:], v, window=252, stride=1)
    h_dates = dates[252:]
    fractal = {
        "h_overall": DailySeries(dates=h_dates, values=h),
        "h_positive": DailySeries(dates=h_dates, values=hp),
        "h_negative": DailySeries(dates=h_dates, values=hn),
    }
    target = DailySeries(dates=dates, values=rv)

    results = run_ablation(base, fractal, target, ModelSpec(), look_back=60)
    assert set(results) == {"benchmark", "coc_only", "ffc_only", "full"}
    for name, res in results.items():
        for split in ("train", "val", "test"):
            m = res.metrics[split]
            for field in ("mse", "mae", "r2", "qlike"):
                assert np.isfinite(getattr(m, field)), f"{name}/{split}/{field}"

    trace = results["full"].train_trace
    ratio = trace[-1] / trace[0]
    elapsed = time.monotonic() - t0
    ok = ratio <= 0.5 and elapsed < 300.0
    report(9, ok, f"4 configurations complete, full-config loss ratio "
                  f"{ratio:.3f} (<=0.5), wall time {elapsed:.1f} s (<300)")
    assert ratio <= 0.5
    assert elapsed < 300.0


def test_criterion_10_window_counting():
    grid = [
        (504, 252, 1, 253),
        (252, 252, 1, 1),       # N = T
        (300, 252, 100, 1),     # k > N - T
        (300, 252, 48, 2),
        (1000, 252, 5, 150),
        (253, 252, 7, 1),
        (2000, 100, 100, 20),
    ]
    for n, window, stride, expected in grid:
        got = rolling_window_count(n, window, stride)
        formula = (n - window) // stride + 1
        assert got == expected == formula, (n, window, stride)
    report(10, True, f"{len(grid)} (N, T, k) fixtures match "
                     "floor((N-T)/k)+1 including N=T and k>N-T")
