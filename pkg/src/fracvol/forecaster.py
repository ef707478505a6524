"""Supervised next-day volatility forecasting harness.

Rows pair a flattened look-back window of daily features with the next
day's realized volatility. Splits are chronological in a 7:1:2 ratio. The
regressor is a small feedforward net on the flattened window, trained with
mini-batch Adam on MSE; the activation is pluggable between a plain ReLU
and the piecewise-linear oscillator-envelope table, whose interval slopes
serve as the exact backward derivative. Best weights are chosen by
validation QLIKE.

Metrics: mse, mae, r2 = 1 - SSE/SST (SST about the split's target mean),
qlike = mean(y/p - ln(y/p) - 1) with predictions floored at 1e-8 (floor
count reported).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DivergedLoss, EmptySplit, InsufficientData
from .market import DailySeries, MinMaxScaler, minmax_apply, minmax_fit
from .oscillator import MetaActivationLUT, build_lut, lut_activation_batch

QLIKE_FLOOR = 1e-8
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class SupervisedDataset:
    inputs: np.ndarray
    targets: np.ndarray
    target_dates: np.ndarray
    train: slice
    val: slice
    test: slice
    feature_names: tuple[str, ...]
    look_back: int


@dataclass(frozen=True)
class ModelSpec:
    hidden: tuple[int, ...] = (64, 32)
    activation: str = "static_relu"
    learning_rate: float = 0.001
    batch_size: int = 64
    epochs: int = 50
    seed: int = 0
    lut: Optional[MetaActivationLUT] = None

    def __post_init__(self):
        if self.activation not in ("static_relu", "coc_lut"):
            raise ValueError(f"unknown activation {self.activation!r}")
        if any(w < 1 for w in self.hidden):
            raise ValueError("hidden widths must be >= 1")


@dataclass(frozen=True)
class Metrics:
    mse: float
    mae: float
    r2: float
    qlike: float
    n_floored: int = 0

    def as_dict(self) -> dict:
        return {
            "mse": self.mse,
            "mae": self.mae,
            "r2": self.r2,
            "qlike": self.qlike,
            "n_floored": self.n_floored,
        }


@dataclass
class TrainedModel:
    weights: list[np.ndarray]
    spec: ModelSpec
    scaler: MinMaxScaler
    lut: Optional[MetaActivationLUT]
    train_trace: list[float] = field(default_factory=list)
    val_trace: list[float] = field(default_factory=list)
    best_epoch: int = 0


# ---------------------------------------------------------------------------
# dataset construction


def build_dataset(
    features: dict[str, DailySeries],
    target_rv: DailySeries,
    look_back: int = 60,
) -> SupervisedDataset:
    """Windowed supervised rows from aligned daily series.

    The target's dates define the timeline; feature series are matched by
    date and missing days become NaN. Row t covers feature days
    t-look_back+1 .. t and predicts the target at day t+1; any NaN inside
    the window (or target) drops the row. The final day never appears as a
    target, so a gap-free table of N days yields N - look_back - 1 rows.
    Splits are chronological at 70% / 80% of the usable rows.
    """
    if look_back < 1:
        raise ValueError("look_back must be >= 1")
    timeline = target_rv.dates
    n = timeline.size
    if n <= look_back + 1:
        raise InsufficientData(
            f"{n} days cannot support look_back={look_back} plus a target"
        )
    names = tuple(features.keys())
    table = np.full((n, len(names)), np.nan)
    for col, name in enumerate(names):
        series = features[name]
        pos = np.searchsorted(timeline, series.dates)
        ok = (pos < n) & (timeline[np.minimum(pos, n - 1)] == series.dates)
        table[pos[ok], col] = series.values[ok]

    y = target_rv.values
    day_ok = np.isfinite(table).all(axis=1)
    rows = []
    targets = []
    dates = []
    for t in range(look_back - 1, n - 2):
        window = slice(t - look_back + 1, t + 1)
        if day_ok[window].all() and np.isfinite(y[t + 1]):
            rows.append(table[window].ravel())
            targets.append(y[t + 1])
            dates.append(timeline[t + 1])
    if not rows:
        raise InsufficientData("no usable rows after dropping missing days")
    inputs = np.array(rows)
    targets = np.array(targets)
    r = inputs.shape[0]
    i70 = int(r * 0.7)
    i80 = int(r * 0.8)
    return SupervisedDataset(
        inputs=inputs,
        targets=targets,
        target_dates=np.array(dates),
        train=slice(0, i70),
        val=slice(i70, i80),
        test=slice(i80, r),
        feature_names=names,
        look_back=look_back,
    )


# ---------------------------------------------------------------------------
# network internals

_DEFAULT_LUT: Optional[MetaActivationLUT] = None


def _default_lut() -> MetaActivationLUT:
    global _DEFAULT_LUT
    if _DEFAULT_LUT is None:
        _DEFAULT_LUT = build_lut()
    return _DEFAULT_LUT


def _init_weights(dims: list[int], seed: int) -> list[np.ndarray]:
    rng = np.random.Generator(np.random.Philox(key=seed))
    weights = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        scale = np.sqrt(2.0 / fan_in)
        weights.append(rng.standard_normal((fan_in, fan_out)) * scale)
        weights.append(np.zeros(fan_out))
    return weights


def _activate(z: np.ndarray, kind: str, lut: Optional[MetaActivationLUT]):
    if kind == "static_relu":
        mask = z > 0.0
        return np.where(mask, z, 0.0), mask.astype(np.float64)
    value, slope = lut_activation_batch(lut, z)
    return value, slope


def _forward(x: np.ndarray, weights: list[np.ndarray], kind: str,
             lut: Optional[MetaActivationLUT]):
    """Returns (predictions, per-layer caches for backprop)."""
    a = x
    caches = []
    n_layers = len(weights) // 2
    for layer in range(n_layers - 1):
        w, b = weights[2 * layer], weights[2 * layer + 1]
        z = a @ w + b
        a_next, slope = _activate(z, kind, lut)
        caches.append((a, slope))
        a = a_next
    w, b = weights[-2], weights[-1]
    pred = (a @ w + b).ravel()
    caches.append((a, None))
    return pred, caches


def _backward(pred, y, weights, caches):
    """MSE gradient for every weight/bias, matching _forward's layout."""
    n = y.size
    grads: list[np.ndarray] = [np.empty(0)] * len(weights)
    delta = (2.0 / n) * (pred - y)
    delta = delta[:, None]
    for layer in range(len(weights) // 2 - 1, -1, -1):
        a_in, slope = caches[layer]
        grads[2 * layer] = a_in.T @ delta
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weights[2 * layer].T) * caches[layer - 1][1]
    grads[-2] = grads[-2].reshape(weights[-2].shape)
    return grads


def _mse(pred: np.ndarray, y: np.ndarray) -> float:
    d = pred - y
    return float(d @ d / y.size)


def _qlike(y: np.ndarray, pred: np.ndarray) -> tuple[float, int]:
    floored = int((pred < QLIKE_FLOOR).sum())
    p = np.maximum(pred, QLIKE_FLOOR)
    if np.any(y <= 0.0):
        return float("nan"), floored
    ratio = y / p
    return float(np.mean(ratio - np.log(ratio) - 1.0)), floored


def network_gradients(model: "TrainedModel", x: np.ndarray, y: np.ndarray):
    """Analytic MSE gradients on a fixed batch (x is pre-scaled)."""
    pred, caches = _forward(x, model.weights, model.spec.activation, model.lut)
    return _backward(pred, y, model.weights, caches), _mse(pred, y)


# ---------------------------------------------------------------------------
# training


def train(dataset: SupervisedDataset, spec: ModelSpec) -> TrainedModel:
    """Mini-batch Adam on MSE with best-epoch selection by validation QLIKE.

    The per-epoch traces start at index 0 with the untrained network's loss.
    With an empty validation split the final epoch's weights are kept.
    """
    x_train = dataset.inputs[dataset.train]
    y_train = dataset.targets[dataset.train]
    if x_train.shape[0] == 0:
        raise InsufficientData("training split is empty")
    scaler = minmax_fit(x_train)
    x_all = minmax_apply(scaler, dataset.inputs)
    x_train = x_all[dataset.train]
    x_val = x_all[dataset.val]
    y_val = dataset.targets[dataset.val]

    lut = None
    if spec.activation == "coc_lut":
        lut = spec.lut if spec.lut is not None else _default_lut()

    dims = [x_train.shape[1], *spec.hidden, 1]
    weights = _init_weights(dims, spec.seed)
    adam_m = [np.zeros_like(w) for w in weights]
    adam_v = [np.zeros_like(w) for w in weights]
    adam_t = 0

    def full_losses(ws):
        with np.errstate(over="ignore", invalid="ignore"):
            pred_tr, _ = _forward(x_train, ws, spec.activation, lut)
            train_loss = _mse(pred_tr, y_train)
            if y_val.size:
                pred_v, _ = _forward(x_val, ws, spec.activation, lut)
                return train_loss, _mse(pred_v, y_val), _qlike(y_val, pred_v)[0]
        return train_loss, float("nan"), float("nan")

    train_trace = []
    val_trace = []
    t0_train, t0_val, t0_qlike = full_losses(weights)
    train_trace.append(t0_train)
    val_trace.append(t0_val)
    best_qlike = t0_qlike
    best_weights = [w.copy() for w in weights]
    best_epoch = 0

    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    n_train = y_train.size
    for epoch in range(1, spec.epochs + 1):
        order = rng.permutation(n_train)
        for lo in range(0, n_train, spec.batch_size):
            idx = order[lo:lo + spec.batch_size]
            # overflow is not a warning here: divergence is detected per
            # batch and surfaces as DivergedLoss
            with np.errstate(over="ignore", invalid="ignore"):
                pred, caches = _forward(x_train[idx], weights, spec.activation, lut)
                batch_loss = _mse(pred, y_train[idx])
            if not np.isfinite(batch_loss):
                raise DivergedLoss(f"non-finite loss in epoch {epoch}")
            grads = _backward(pred, y_train[idx], weights, caches)
            adam_t += 1
            for j, g in enumerate(grads):
                adam_m[j] = ADAM_BETA1 * adam_m[j] + (1 - ADAM_BETA1) * g
                adam_v[j] = ADAM_BETA2 * adam_v[j] + (1 - ADAM_BETA2) * g * g
                m_hat = adam_m[j] / (1 - ADAM_BETA1**adam_t)
                v_hat = adam_v[j] / (1 - ADAM_BETA2**adam_t)
                weights[j] = weights[j] - spec.learning_rate * m_hat / (
                    np.sqrt(v_hat) + ADAM_EPS
                )
        ep_train, ep_val, ep_qlike = full_losses(weights)
        if not np.isfinite(ep_train):
            raise DivergedLoss(f"non-finite loss after epoch {epoch}")
        train_trace.append(ep_train)
        val_trace.append(ep_val)
        if y_val.size:
            if np.isfinite(ep_qlike) and not ep_qlike >= best_qlike:
                best_qlike = ep_qlike
                best_weights = [w.copy() for w in weights]
                best_epoch = epoch
        else:
            best_weights = [w.copy() for w in weights]
            best_epoch = epoch

    return TrainedModel(
        weights=best_weights,
        spec=spec,
        scaler=scaler,
        lut=lut,
        train_trace=train_trace,
        val_trace=val_trace,
        best_epoch=best_epoch,
    )


def predict(model: TrainedModel, inputs: np.ndarray) -> np.ndarray:
    """Forecasts for raw (unscaled) input rows."""
    x = minmax_apply(model.scaler, np.atleast_2d(inputs))
    pred, _ = _forward(x, model.weights, model.spec.activation, model.lut)
    return pred


def metrics_from_predictions(y_true, y_pred) -> Metrics:
    """The four scores for a set of predictions.

    r2 is nan when the targets are constant (zero SST) and imperfectly
    predicted; qlike is nan when any target is non-positive.
    """
    y = np.asarray(y_true, dtype=np.float64)
    p = np.asarray(y_pred, dtype=np.float64)
    if y.size == 0:
        raise EmptySplit("no rows to evaluate")
    err = p - y
    mse = float(err @ err / y.size)
    mae = float(np.abs(err).mean())
    centered = y - y.mean()
    sst = float(centered @ centered)
    if sst == 0.0:
        r2 = 1.0 if mse == 0.0 else float("nan")
    else:
        r2 = 1.0 - mse * y.size / sst
    qlike, n_floored = _qlike(y, p)
    return Metrics(mse=mse, mae=mae, r2=r2, qlike=qlike, n_floored=n_floored)


def evaluate(model: TrainedModel, dataset: SupervisedDataset,
             split: str = "test") -> Metrics:
    """Metrics on one chronological split ('train', 'val' or 'test')."""
    sl = {"train": dataset.train, "val": dataset.val, "test": dataset.test}[split]
    x = dataset.inputs[sl]
    y = dataset.targets[sl]
    if y.size == 0:
        raise EmptySplit(f"{split} split is empty")
    return metrics_from_predictions(y, predict(model, x))


# ---------------------------------------------------------------------------
# ablation harness

ABLATION_CONFIGS = ("benchmark", "coc_only", "ffc_only", "full")


@dataclass(frozen=True)
class AblationResult:
    metrics: dict[str, Metrics]
    train_trace: list[float]
    val_trace: list[float]
    best_epoch: int
    n_rows: int


def run_ablation(
    base_features: dict[str, DailySeries],
    fractal_features: dict[str, DailySeries],
    target_rv: DailySeries,
    spec: ModelSpec,
    look_back: int = 60,
) -> dict[str, AblationResult]:
    """Four-way ablation: {base, base+fractal features} x {relu, lut}.

    benchmark = base/relu, coc_only = base/lut, ffc_only = base+fractal/relu,
    full = base+fractal/lut. Returns per-configuration split metrics and the
    full training-loss trace (index 0 = untrained loss).
    """
    feature_sets = {
        "benchmark": (base_features, "static_relu"),
        "coc_only": (base_features, "coc_lut"),
        "ffc_only": ({**base_features, **fractal_features}, "static_relu"),
        "full": ({**base_features, **fractal_features}, "coc_lut"),
    }
    results = {}
    for name in ABLATION_CONFIGS:
        feats, activation = feature_sets[name]
        dataset = build_dataset(feats, target_rv, look_back=look_back)
        model = train(dataset, replace(spec, activation=activation))
        metrics = {
            split: evaluate(model, dataset, split)
            for split in ("train", "val", "test")
        }
        results[name] = AblationResult(
            metrics=metrics,
            train_trace=model.train_trace,
            val_trace=model.val_trace,
            best_epoch=model.best_epoch,
            n_rows=dataset.targets.size,
        )
    return results
