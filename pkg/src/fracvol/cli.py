"""Command-line interface for reproducible batch runs over CSV artifacts.

Subcommands: features (daily rv/bpv/r/v table from intraday data), hurst
(rolling scaling exponents), oscillator (bifurcation clouds, activation
tables, point evaluations), synth (seeded generators), train and eval
(forecasting harness). Every file-producing run writes a sidecar manifest
with the resolved config hash, library version, and input/output checksums
so runs are auditable. A JSON --config file overrides flag values.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import AllZeroFluctuations, DivergedLoss, EstimationFailure, FracvolError
from .forecaster import (
    ModelSpec,
    TrainedModel,
    build_dataset,
    evaluate,
    predict,
    run_ablation,
    train,
)
from .fractal import FractalConfig, default_scale_grid, rolling_hurst_features
from .market import (
    DailySeries,
    IntradayDay,
    MinMaxScaler,
    daily_features,
    realized_volatility,
    bipower_variation,
    volatility_increment,
)
from .oscillator import (
    bifurcation_diagram,
    build_lut,
    builtin_library,
    builtin_params,
    generate_meta_activations,
)
from .synthetic import gen_asymmetric_vol, gen_fgn, gen_garch_intraday

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_NUMERICAL_ERRORS = (DivergedLoss, EstimationFailure, AllZeroFluctuations)


# ---------------------------------------------------------------------------
# small IO helpers


def _fmt(x: float) -> str:
    """Full-precision decimal; empty field for missing values."""
    x = float(x)
    if not np.isfinite(x):
        return ""
    return repr(x)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _read_rows(path: Path) -> list[list[str]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    return rows


def _read_table(path: Path, required: tuple[str, ...]):
    """Parse a date-keyed CSV into (dates, {column: float array}).

    Empty fields become NaN (missing-value markers survive round trips).
    Malformed cells raise with the file name and line number.
    """
    rows = _read_rows(path)
    header = [c.strip() for c in rows[0]]
    for col in ("date", *required):
        if col not in header:
            raise ValueError(f"{path}: missing required column {col!r}")
    date_idx = header.index("date")
    n = len(rows) - 1
    dates = np.empty(n, dtype="datetime64[D]")
    cols = {name: np.full(n, np.nan) for name in header if name != "date"}
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if len(row) != len(header):
            raise ValueError(
                f"{path} line {line}: expected {len(header)} fields, got {len(row)}"
            )
        try:
            dates[i] = np.datetime64(row[date_idx].strip())
        except ValueError:
            raise ValueError(f"{path} line {line}: bad date {row[date_idx]!r}")
        for j, name in enumerate(header):
            if j == date_idx:
                continue
            text = row[j].strip()
            if text == "":
                continue
            try:
                cols[name][i] = float(text)
            except ValueError:
                raise ValueError(
                    f"{path} line {line}: bad value {text!r} in column {name!r}"
                )
    return dates, cols


def _read_intraday(path: Path):
    """Intraday CSV -> (days, closes or None).

    Accepts `timestamp,price` (within-day returns from prices, close-to-close
    daily return available) or `date,ret_pct` (pre-computed percent returns).
    """
    rows = _read_rows(path)
    header = [c.strip().lower() for c in rows[0]]
    if header == ["timestamp", "price"]:
        by_date: dict[str, list[float]] = {}
        for i, row in enumerate(rows[1:]):
            line = i + 2
            if len(row) != 2:
                raise ValueError(f"{path} line {line}: expected 2 fields")
            stamp = row[0].strip()
            date = stamp[:10]
            try:
                np.datetime64(date)
            except ValueError:
                raise ValueError(f"{path} line {line}: bad timestamp {stamp!r}")
            try:
                price = float(row[1])
            except ValueError:
                raise ValueError(f"{path} line {line}: bad price {row[1]!r}")
            if not np.isfinite(price) or price <= 0.0:
                raise ValueError(
                    f"{path} line {line}: non-positive price {row[1].strip()}"
                )
            by_date.setdefault(date, []).append(price)
        days = []
        closes = []
        for date in sorted(by_date):
            prices = np.asarray(by_date[date])
            days.append(
                IntradayDay(date=date, returns=100.0 * np.diff(np.log(prices)))
            )
            closes.append(prices[-1])
        return days, np.asarray(closes)
    if header == ["date", "ret_pct"]:
        ret_by_date: dict[str, list[float]] = {}
        for i, row in enumerate(rows[1:]):
            line = i + 2
            if len(row) != 2:
                raise ValueError(f"{path} line {line}: expected 2 fields")
            date = row[0].strip()
            try:
                np.datetime64(date)
            except ValueError:
                raise ValueError(f"{path} line {line}: bad date {row[0]!r}")
            try:
                ret = float(row[1])
            except ValueError:
                raise ValueError(f"{path} line {line}: bad return {row[1]!r}")
            if not np.isfinite(ret):
                raise ValueError(f"{path} line {line}: non-finite return {row[1]}")
            ret_by_date.setdefault(date, []).append(ret)
        days = [
            IntradayDay(date=date, returns=np.asarray(ret_by_date[date]))
            for date in sorted(ret_by_date)
        ]
        return days, None
    raise ValueError(
        f"{path} line 1: expected header 'timestamp,price' or 'date,ret_pct', "
        f"got {','.join(header)!r}"
    )


# ---------------------------------------------------------------------------
# manifests


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _run_config(args: argparse.Namespace) -> dict:
    cfg = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("func", "config") and not callable(v)
    }
    return cfg


def _write_manifest(
    manifest_path: Path,
    command: str,
    args: argparse.Namespace,
    inputs: list,
    outputs: list,
) -> None:
    config = _run_config(args)
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    manifest = {
        "command": command,
        "config": config,
        "config_sha256": hashlib.sha256(blob.encode()).hexdigest(),
        "version": __version__,
        "inputs": {str(p): _sha256(Path(p)) for p in inputs},
        "outputs": {str(p): _sha256(Path(p)) for p in outputs},
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require(value, flag: str):
    if value is None:
        raise ValueError(f"{flag} is required (flag or config file)")
    return value


# ---------------------------------------------------------------------------
# subcommands


def cmd_features(args: argparse.Namespace) -> int:
    src = Path(_require(args.input, "--input"))
    out = Path(_require(args.out, "--out"))
    days, closes = _read_intraday(src)
    dates, rv, bpv, r, v = daily_features(days, closes)
    rows = [
        (str(dates[i]), _fmt(rv[i]), _fmt(bpv[i]), _fmt(r[i]), _fmt(v[i]))
        for i in range(dates.size)
    ]
    _write_csv(out, ["date", "rv", "bpv", "r", "v"], rows)
    _write_manifest(Path(f"{out}.manifest.json"), "features", args, [src], [out])
    return EXIT_OK


def cmd_hurst(args: argparse.Namespace) -> int:
    src = Path(_require(args.input, "--input"))
    out = Path(_require(args.out, "--out"))
    dates, cols = _read_table(src, required=("r", "v"))
    window = int(args.window)
    stride = int(args.stride)
    s_max = None if args.scale_max is None else int(args.scale_max)
    scales = default_scale_grid(
        window, s_min=int(args.scale_min), n_scales=int(args.n_scales), s_max=s_max
    )
    cfg = FractalConfig(
        overlap_ratio=float(args.overlap),
        detrend_order=int(args.order),
        q=float(args.q),
        scales=scales,
    )
    h, h_pos, h_neg = rolling_hurst_features(
        cols["r"], cols["v"], window=window, stride=stride, cfg=cfg
    )
    rows = []
    for i in range(h.size):
        last = i * stride + window - 1
        rows.append((str(dates[last]), _fmt(h[i]), _fmt(h_pos[i]), _fmt(h_neg[i])))
    _write_csv(out, ["date", "h_overall", "h_positive", "h_negative"], rows)
    _write_manifest(Path(f"{out}.manifest.json"), "hurst", args, [src], [out])
    return EXIT_OK


def _oscillator_selection(type_flag):
    """--type 'all' or a single id -> (library list, lowercase labels)."""
    text = str(type_flag).strip().lower()
    if text == "all":
        library = builtin_library()
    else:
        library = [builtin_params(int(text))]
    return library, [p.label.lower() for p in library]


def cmd_oscillator(args: argparse.Namespace) -> int:
    mode = args.mode
    if mode == "bifurcation":
        if str(args.type).strip().lower() == "all":
            raise ValueError("bifurcation mode needs a single --type (1..10)")
        params = builtin_params(int(args.type))
        out = Path(_require(args.out, "--out"))
        grid = np.linspace(
            float(args.grid_min), float(args.grid_max), int(args.grid_points)
        )
        points = bifurcation_diagram(
            params, grid, n_steps=int(args.steps), n_discard=int(args.discard)
        )
        rows = [(_fmt(a), _fmt(b)) for a, b in points]
        _write_csv(out, ["input", "value"], rows)
        _write_manifest(Path(f"{out}.manifest.json"), "oscillator", args, [], [out])
        return EXIT_OK

    library, labels = _oscillator_selection(args.type)
    if mode == "lut":
        out = Path(_require(args.out, "--out"))
        lut = build_lut(
            library,
            x_lo=float(args.domain_min),
            x_hi=float(args.domain_max),
            n_knots=int(args.knots),
            n_steps=int(args.steps),
        )
        rows = []
        for i, knot in enumerate(lut.knots):
            rows.append(
                (_fmt(knot),
                 *(_fmt(v) for v in lut.per_type_values[:, i]),
                 _fmt(lut.envelope_values[i]))
            )
        _write_csv(out, ["knot", *labels, "envelope"], rows)
        _write_manifest(Path(f"{out}.manifest.json"), "oscillator", args, [], [out])
        return EXIT_OK

    if mode == "meta":
        if args.at is None:
            raise ValueError("meta mode needs --at <input value>")
        values = generate_meta_activations(
            float(args.at), library, n_steps=int(args.steps)
        )
        lines = [f"{label},{_fmt(value)}" for label, value in zip(labels, values)]
        for line in lines:
            print(line)
        if args.out:
            out = Path(args.out)
            _write_csv(out, ["type", "value"],
                       [line.split(",") for line in lines])
            _write_manifest(
                Path(f"{out}.manifest.json"), "oscillator", args, [], [out]
            )
        return EXIT_OK

    raise ValueError(f"unknown oscillator mode {mode!r}")


def _synth_dates(n: int) -> np.ndarray:
    return np.datetime64("2000-01-03") + np.arange(n)


def cmd_synth(args: argparse.Namespace) -> int:
    out = Path(_require(args.out, "--out"))
    kind = args.kind
    seed = int(args.seed)
    if kind == "fgn":
        h = float(_require(args.hurst, "--hurst"))
        n = int(_require(args.n, "--n"))
        x = gen_fgn(h, n, seed)
        dates = _synth_dates(n)
        rows = [(str(dates[i]), "", "", _fmt(x[i]), _fmt(x[i])) for i in range(n)]
    elif kind == "asym":
        h = float(_require(args.hurst, "--hurst"))
        n = int(_require(args.n, "--n"))
        rx, ry = gen_asymmetric_vol(h, float(args.amp), n, seed)
        dates = _synth_dates(n)
        rows = [(str(dates[i]), "", "", _fmt(rx[i]), _fmt(ry[i])) for i in range(n)]
    elif kind == "garch":
        days = gen_garch_intraday(
            float(args.omega), float(args.alpha), float(args.beta),
            int(_require(args.days, "--days")), int(args.m_per_day), seed,
        )
        dates = np.array([d.date for d in days], dtype="datetime64[D]")
        rv = np.array([realized_volatility(d) for d in days])
        bpv = np.array([bipower_variation(d) for d in days])
        r = np.array([float(d.returns.sum()) for d in days])
        v = volatility_increment(DailySeries(dates=dates, values=bpv)).values
        # day 1 has no prior day, so its volatility increment stays empty
        v = np.concatenate([[np.nan], v])
        rows = [
            (str(dates[i]), _fmt(rv[i]), _fmt(bpv[i]), _fmt(r[i]), _fmt(v[i]))
            for i in range(dates.size)
        ]
    else:
        raise ValueError(f"unknown synth kind {kind!r}")
    _write_csv(out, ["date", "rv", "bpv", "r", "v"], rows)
    _write_manifest(Path(f"{out}.manifest.json"), "synth", args, [], [out])
    return EXIT_OK


# ---------------------------------------------------------------------------
# train / eval plumbing


def _parse_hidden(value) -> tuple[int, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(int(w) for w in value)
    text = str(value).strip()
    if not text:
        return ()
    return tuple(int(part) for part in text.split(",") if part.strip())


def _feature_series(path: Path, names: tuple[str, ...]):
    dates, cols = _read_table(path, required=names)
    return {name: DailySeries(dates=dates, values=cols[name]) for name in names}


def _load_features(args: argparse.Namespace):
    """(base features, fractal features, target) from the input CSVs."""
    feat_path = Path(_require(args.features, "--features"))
    base = _feature_series(feat_path, ("rv", "r", "v"))
    target = base["rv"]
    fractal = {}
    inputs = [feat_path]
    if args.hurst_csv:
        hurst_path = Path(args.hurst_csv)
        fractal = _feature_series(
            hurst_path, ("h_overall", "h_positive", "h_negative")
        )
        inputs.append(hurst_path)
    return base, fractal, target, inputs


def _metrics_json(model_metrics: dict) -> dict:
    return {split: m.as_dict() for split, m in model_metrics.items()}


def _evaluate_splits(model, dataset) -> dict:
    out = {}
    for split in ("train", "val", "test"):
        sl = getattr(dataset, split)
        if dataset.targets[sl].size == 0:
            out[split] = None
            continue
        out[split] = evaluate(model, dataset, split).as_dict()
    return out


def _write_predictions(path: Path, dataset, model) -> None:
    sl = dataset.test
    dates = dataset.target_dates[sl]
    actual = dataset.targets[sl]
    predicted = predict(model, dataset.inputs[sl])
    rows = [
        (str(dates[i]), _fmt(actual[i]), _fmt(predicted[i]))
        for i in range(actual.size)
    ]
    _write_csv(path, ["date", "actual", "predicted"], rows)


def _save_model(out_dir: Path, model: TrainedModel, feature_names, look_back: int):
    arrays = {f"param_{i}": w for i, w in enumerate(model.weights)}
    arrays["scaler_min"] = model.scaler.x_min
    arrays["scaler_max"] = model.scaler.x_max
    np.savez(out_dir / "model.npz", **arrays)
    spec = model.spec
    meta = {
        "version": __version__,
        "feature_names": list(feature_names),
        "look_back": look_back,
        "best_epoch": model.best_epoch,
        "spec": {
            "hidden": list(spec.hidden),
            "activation": spec.activation,
            "learning_rate": spec.learning_rate,
            "batch_size": spec.batch_size,
            "epochs": spec.epochs,
            "seed": spec.seed,
        },
    }
    with open(out_dir / "model.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_model(model_dir: Path):
    with open(model_dir / "model.json") as fh:
        meta = json.load(fh)
    data = np.load(model_dir / "model.npz")
    n_params = sum(1 for k in data.files if k.startswith("param_"))
    weights = [data[f"param_{i}"] for i in range(n_params)]
    scaler = MinMaxScaler(x_min=data["scaler_min"], x_max=data["scaler_max"])
    spec = ModelSpec(
        hidden=tuple(meta["spec"]["hidden"]),
        activation=meta["spec"]["activation"],
        learning_rate=meta["spec"]["learning_rate"],
        batch_size=meta["spec"]["batch_size"],
        epochs=meta["spec"]["epochs"],
        seed=meta["spec"]["seed"],
    )
    lut = None
    if spec.activation == "coc_lut":
        from .forecaster import _default_lut

        lut = _default_lut()
    model = TrainedModel(
        weights=weights, spec=spec, scaler=scaler, lut=lut,
        best_epoch=meta["best_epoch"],
    )
    return model, meta


def _model_spec(args: argparse.Namespace) -> ModelSpec:
    return ModelSpec(
        hidden=_parse_hidden(args.hidden),
        activation=args.activation,
        learning_rate=float(args.lr),
        batch_size=int(args.batch_size),
        epochs=int(args.epochs),
        seed=int(args.seed),
    )


def cmd_train(args: argparse.Namespace) -> int:
    out_dir = Path(_require(args.out_dir, "--out-dir"))
    out_dir.mkdir(parents=True, exist_ok=True)
    base, fractal, target, inputs = _load_features(args)
    spec = _model_spec(args)
    look_back = int(args.look_back)

    if args.ablation:
        if not fractal:
            raise ValueError("--ablation needs --hurst-csv for the fractal features")
        results = run_ablation(base, fractal, target, spec, look_back=look_back)
        report = {
            name: {
                "metrics": _metrics_json(res.metrics),
                "train_trace": res.train_trace,
                "val_trace": res.val_trace,
                "best_epoch": res.best_epoch,
                "n_rows": res.n_rows,
            }
            for name, res in results.items()
        }
        ablation_path = out_dir / "ablation.json"
        with open(ablation_path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _write_manifest(out_dir / "manifest.json", "train", args, inputs,
                        [ablation_path])
        return EXIT_OK

    features = {**base, **fractal}
    dataset = build_dataset(features, target, look_back=look_back)
    model = train(dataset, spec)
    metrics = {
        "splits": _evaluate_splits(model, dataset),
        "best_epoch": model.best_epoch,
        "train_trace": model.train_trace,
        "val_trace": model.val_trace,
    }
    metrics_path = out_dir / "metrics.json"
    with open(metrics_path, "w") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    predictions_path = out_dir / "predictions.csv"
    _write_predictions(predictions_path, dataset, model)
    _save_model(out_dir, model, dataset.feature_names, look_back)
    _write_manifest(
        out_dir / "manifest.json", "train", args, inputs,
        [metrics_path, predictions_path, out_dir / "model.npz",
         out_dir / "model.json"],
    )
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    model_dir = Path(_require(args.model_dir, "--model-dir"))
    out_dir = Path(_require(args.out_dir, "--out-dir"))
    out_dir.mkdir(parents=True, exist_ok=True)
    model, meta = _load_model(model_dir)
    base, fractal, target, inputs = _load_features(args)
    features = {**base, **fractal}
    missing = [n for n in meta["feature_names"] if n not in features]
    if missing:
        raise ValueError(
            f"model was trained with features {missing} not present here "
            f"(pass --hurst-csv?)"
        )
    ordered = {name: features[name] for name in meta["feature_names"]}
    dataset = build_dataset(ordered, target, look_back=meta["look_back"])
    metrics = {
        "splits": _evaluate_splits(model, dataset),
        "best_epoch": model.best_epoch,
    }
    metrics_path = out_dir / "metrics.json"
    with open(metrics_path, "w") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
    predictions_path = out_dir / "predictions.csv"
    _write_predictions(predictions_path, dataset, model)
    _write_manifest(
        out_dir / "manifest.json", "eval", args,
        inputs + [model_dir / "model.npz", model_dir / "model.json"],
        [metrics_path, predictions_path],
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracvol",
        description="Fractal volatility toolkit: features, scaling exponents, "
        "chaotic activations, synthetic data, and forecasting runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="daily rv/bpv/r/v table from intraday data")
    p.add_argument("--input", help="intraday CSV (timestamp,price or date,ret_pct)")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--config", help="JSON config overriding flags")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("hurst", help="rolling scaling exponents from a feature CSV")
    p.add_argument("--input", help="feature CSV with r and v columns")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--window", type=int, default=252)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--overlap", type=float, default=1.0 / 3.0)
    p.add_argument("--order", type=int, default=2, help="detrending order")
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--scale-min", type=int, default=16)
    p.add_argument("--scale-max", type=int, default=None)
    p.add_argument("--n-scales", type=int, default=15)
    p.add_argument("--config", help="JSON config overriding flags")
    p.set_defaults(func=cmd_hurst)

    p = sub.add_parser("oscillator", help="bifurcation, activation table, or "
                                          "point evaluation exports")
    p.add_argument("--mode", required=True,
                   choices=("bifurcation", "lut", "meta"))
    p.add_argument("--type", default="all", help="oscillator type 1..10 or 'all'")
    p.add_argument("--at", type=float, default=None,
                   help="input value for --mode meta")
    p.add_argument("--grid-min", type=float, default=-1.0)
    p.add_argument("--grid-max", type=float, default=1.0)
    p.add_argument("--grid-points", type=int, default=201)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--discard", type=int, default=50,
                   help="transient steps dropped in bifurcation mode")
    p.add_argument("--knots", type=int, default=4001)
    p.add_argument("--domain-min", type=float, default=-2.0)
    p.add_argument("--domain-max", type=float, default=2.0)
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--config", help="JSON config overriding flags")
    p.set_defaults(func=cmd_oscillator)

    p = sub.add_parser("synth", help="seeded synthetic series in the feature schema")
    p.add_argument("--kind", required=True, choices=("fgn", "garch", "asym"))
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hurst", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--amp", type=float, default=2.0,
                   help="downtrend amplification for --kind asym")
    p.add_argument("--omega", type=float, default=0.01)
    p.add_argument("--alpha", type=float, default=0.09)
    p.add_argument("--beta", type=float, default=0.90)
    p.add_argument("--days", type=int, default=None)
    p.add_argument("--m-per-day", type=int, default=39)
    p.add_argument("--config", help="JSON config overriding flags")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit the forecaster and write metrics, "
                                     "predictions, and the model")
    p.add_argument("--features", help="feature CSV (date,rv,bpv,r,v)")
    p.add_argument("--hurst-csv", default=None,
                   help="optional rolling-exponent CSV to add as features")
    p.add_argument("--out-dir", help="output directory")
    p.add_argument("--look-back", type=int, default=60)
    p.add_argument("--hidden", default="64,32",
                   help="comma-separated hidden widths; empty for linear")
    p.add_argument("--activation", default="static_relu",
                   choices=("static_relu", "coc_lut"))
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ablation", action="store_true",
                   help="run the four-configuration comparison instead of "
                        "a single fit")
    p.add_argument("--config", help="JSON config overriding flags")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on a feature CSV")
    p.add_argument("--model-dir", help="directory with model.npz + model.json")
    p.add_argument("--features", help="feature CSV (date,rv,bpv,r,v)")
    p.add_argument("--hurst-csv", default=None)
    p.add_argument("--out-dir", help="output directory")
    p.add_argument("--config", help="JSON config overriding flags")
    p.set_defaults(func=cmd_eval)

    return parser


def _apply_config(args: argparse.Namespace) -> None:
    """JSON config keys (dashes or underscores) override parsed flag values."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{args.config}: config must be a JSON object")
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest in ("config", "func", "command") or not hasattr(args, dest):
            raise ValueError(f"{args.config}: unknown config key {key!r}")
        setattr(args, dest, value)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        _apply_config(args)
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (FracvolError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
