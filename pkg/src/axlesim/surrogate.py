"""Multitask regression surrogate: RBM-pretrained sigmoid stack with a
locally connected output head, plus a fully connected baseline network.

The stack is pretrained greedily, one restricted Boltzmann machine per hidden
layer (CD-1), then fine-tuned end to end by mini-batch SGD with momentum on
the summed-task squared error. Each output unit connects to a contiguous
window of the last hidden layer; adjacent windows share units, and gradients
never flow outside a task's window. The fully connected baseline uses the
same layer widths and training protocol without pretraining or masking.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EvaluationError, NormalizationError, TrainingError

NORM_LO = 0.1   # targets are min-max mapped into [NORM_LO, NORM_HI]
NORM_HI = 0.9

CHECKPOINT_MAGIC = "axlesim-checkpoint v1"


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass(frozen=True)
class TrainConfig:
    """Schedules and seeds for pretraining and fine-tuning."""

    epochs: int = 50
    batch_size: int = 32
    pretrain_epochs: int = 10       # per RBM layer
    pretrain_lr: float = 0.05
    finetune_lr: float = 0.3
    momentum: float = 0.9
    seed: int = 0
    split: tuple[float, float, float] = (0.8, 0.1, 0.1)
    grad_workers: int = 1           # per-batch gradient shards, fixed reduction order

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.pretrain_epochs < 0:
            raise ConfigError(f"pretrain_epochs must be >= 0, got {self.pretrain_epochs}")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")
        if len(self.split) != 3 or any(f < 0 for f in self.split) \
                or abs(sum(self.split) - 1.0) > 1e-9:
            raise ConfigError(f"split fractions must sum to 1, got {self.split}")
        if self.grad_workers < 1:
            raise ConfigError(f"grad_workers must be >= 1, got {self.grad_workers}")


@dataclass
class RbmLayer:
    """One restricted Boltzmann machine of the stack."""

    weights: np.ndarray   # (visible, hidden)
    v_bias: np.ndarray
    h_bias: np.ndarray
    kind: str             # "gaussian" (first layer) or "bernoulli"

    def hidden_probs(self, visible: np.ndarray) -> np.ndarray:
        return _sigmoid(visible @ self.weights + self.h_bias)

    def reconstruct(self, visible: np.ndarray) -> np.ndarray:
        """Deterministic mean-field reconstruction (no sampling)."""
        hidden = self.hidden_probs(visible)
        pre = hidden @ self.weights.T + self.v_bias
        return pre if self.kind == "gaussian" else _sigmoid(pre)


def reconstruction_error(layer: RbmLayer, data: np.ndarray) -> float:
    """Mean squared error (gaussian) or cross-entropy (bernoulli) of the
    deterministic reconstruction."""
    recon = layer.reconstruct(data)
    if layer.kind == "gaussian":
        return float(np.mean((data - recon) ** 2))
    eps = 1e-12
    recon = np.clip(recon, eps, 1.0 - eps)
    return float(-np.mean(data * np.log(recon) + (1.0 - data) * np.log(1.0 - recon)))


def _init_rbm(rng: np.random.Generator, n_visible: int, n_hidden: int,
              kind: str) -> RbmLayer:
    return RbmLayer(
        weights=rng.normal(0.0, 0.1, size=(n_visible, n_hidden)),
        v_bias=np.zeros(n_visible),
        h_bias=np.zeros(n_hidden),
        kind=kind,
    )


def _cd1_epoch(layer: RbmLayer, data: np.ndarray, order: np.ndarray,
               batch_size: int, lr: float, momentum: float,
               rng: np.random.Generator, velocity) -> None:
    vel_w, vel_vb, vel_hb = velocity
    for start in range(0, order.size, batch_size):
        v0 = data[order[start:start + batch_size]]
        count = v0.shape[0]
        h0_prob = _sigmoid(v0 @ layer.weights + layer.h_bias)
        h0_sample = (rng.random(h0_prob.shape) < h0_prob).astype(float)
        pre = h0_sample @ layer.weights.T + layer.v_bias
        v1 = pre if layer.kind == "gaussian" else _sigmoid(pre)
        h1_prob = _sigmoid(v1 @ layer.weights + layer.h_bias)

        grad_w = (v0.T @ h0_prob - v1.T @ h1_prob) / count
        grad_vb = np.mean(v0 - v1, axis=0)
        grad_hb = np.mean(h0_prob - h1_prob, axis=0)

        vel_w *= momentum
        vel_w += lr * grad_w
        vel_vb *= momentum
        vel_vb += lr * grad_vb
        vel_hb *= momentum
        vel_hb += lr * grad_hb
        layer.weights += vel_w
        layer.v_bias += vel_vb
        layer.h_bias += vel_hb


def pretrain_dbn(inputs: np.ndarray, layer_widths, cfg: TrainConfig,
                 rng: np.random.Generator | None = None) -> list[RbmLayer]:
    """Greedy layer-wise CD-1 pretraining of the hidden stack.

    `inputs` must be standardized (zero mean, unit variance per column); the
    first layer has gaussian visible units, all later layers bernoulli. After
    a layer trains, its hidden probabilities feed the next layer.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    data = np.asarray(inputs, dtype=float)
    layers: list[RbmLayer] = []
    for li, width in enumerate(layer_widths):
        kind = "gaussian" if li == 0 else "bernoulli"
        layer = _init_rbm(rng, data.shape[1], int(width), kind)
        velocity = (np.zeros_like(layer.weights), np.zeros_like(layer.v_bias),
                    np.zeros_like(layer.h_bias))
        for epoch in range(cfg.pretrain_epochs):
            order = rng.permutation(data.shape[0])
            _cd1_epoch(layer, data, order, cfg.batch_size, cfg.pretrain_lr,
                       cfg.momentum, rng, velocity)
            if not (np.all(np.isfinite(layer.weights))
                    and np.all(np.isfinite(layer.v_bias))
                    and np.all(np.isfinite(layer.h_bias))):
                raise TrainingError(
                    f"non-finite weights while pretraining layer {li} "
                    f"(epoch {epoch}); lower pretrain_lr")
        layers.append(layer)
        data = layer.hidden_probs(data)
    return layers


def window_mask(tasks: int, width: int, window: int, stride: int) -> np.ndarray:
    """(tasks, width) 0/1 mask of contiguous, overlapping task windows."""
    if window < 1 or stride < 1:
        raise ConfigError(f"window and stride must be >= 1, got {window}, {stride}")
    if tasks > 1 and window <= stride:
        raise ConfigError(
            f"adjacent task windows must overlap: need window > stride, "
            f"got window={window}, stride={stride}")
    top = (tasks - 1) * stride + window
    if top > width:
        raise ConfigError(
            f"task windows exceed last hidden width: (tasks-1)*stride + window "
            f"= {top} > {width}")
    mask = np.zeros((tasks, width))
    for t in range(tasks):
        mask[t, t * stride: t * stride + window] = 1.0
    return mask


@dataclass
class MtlNetwork:
    """Sigmoid feedforward stack with a masked multitask output head.

    The mask is fixed at construction and never altered by training. Inputs
    are standardized with the stored mean/std; targets are min-max normalized
    into [NORM_LO, NORM_HI] and predictions are de-normalized back.
    """

    hidden: list            # [(W, b), ...] with W (fan_in, fan_out)
    out_w: np.ndarray       # (tasks, last_hidden_width)
    out_b: np.ndarray       # (tasks,)
    mask: np.ndarray        # (tasks, last_hidden_width), 0/1, frozen
    kind: str               # "mtl" or "dnn"
    window: int             # 0 for the fully connected baseline
    stride: int
    input_mean: np.ndarray = None
    input_std: np.ndarray = None
    target_min: np.ndarray = None
    target_max: np.ndarray = None
    input_lo: np.ndarray = None   # training input range, for extrapolation flag
    input_hi: np.ndarray = None

    def __post_init__(self):
        self.mask.flags.writeable = False
        d = self.hidden[0][0].shape[0] if self.hidden else self.out_w.shape[1]
        t = self.out_w.shape[0]
        if self.input_mean is None:
            self.input_mean = np.zeros(d)
            self.input_std = np.ones(d)
        if self.target_min is None:
            self.target_min = np.zeros(t)
            self.target_max = np.ones(t)
        if self.input_lo is None:
            self.input_lo = np.full(d, -np.inf)
            self.input_hi = np.full(d, np.inf)

    @property
    def tasks(self) -> int:
        return self.out_w.shape[0]

    @property
    def input_dim(self) -> int:
        return self.hidden[0][0].shape[0] if self.hidden else self.out_w.shape[1]

    @property
    def hidden_widths(self) -> tuple[int, ...]:
        return tuple(w.shape[1] for w, _ in self.hidden)

    def parameters(self) -> list[np.ndarray]:
        params = []
        for w, b in self.hidden:
            params.extend((w, b))
        params.extend((self.out_w, self.out_b))
        return params


def network_from_rbms(rbm_layers, tasks: int, window: int, stride: int,
                      rng: np.random.Generator) -> MtlNetwork:
    """Turn a pretrained stack into the masked multitask network."""
    hidden = [(layer.weights, layer.h_bias) for layer in rbm_layers]
    width = hidden[-1][0].shape[1]
    mask = window_mask(tasks, width, window, stride)
    out_w = rng.normal(0.0, 1.0 / np.sqrt(window), size=(tasks, width)) * mask
    return MtlNetwork(hidden=hidden, out_w=out_w, out_b=np.zeros(tasks),
                      mask=mask, kind="mtl", window=window, stride=stride)


def build_dnn_network(input_dim: int, hidden_widths, tasks: int,
                      rng: np.random.Generator) -> MtlNetwork:
    """Fully connected baseline with the same layer widths, random init."""
    hidden = []
    fan_in = input_dim
    for width in hidden_widths:
        limit = np.sqrt(6.0 / (fan_in + width))
        hidden.append((rng.uniform(-limit, limit, size=(fan_in, width)),
                       np.zeros(width)))
        fan_in = width
    mask = np.ones((tasks, fan_in))
    out_w = rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(tasks, fan_in))
    return MtlNetwork(hidden=hidden, out_w=out_w, out_b=np.zeros(tasks),
                      mask=mask, kind="dnn", window=0, stride=0)


def fit_normalization(net: MtlNetwork, x_train: np.ndarray, y_train: np.ndarray) -> None:
    """Set input standardization and target min-max constants from data."""
    std = x_train.std(axis=0)
    std[std == 0.0] = 1.0
    net.input_mean = x_train.mean(axis=0)
    net.input_std = std
    net.input_lo = x_train.min(axis=0)
    net.input_hi = x_train.max(axis=0)
    tmin = y_train.min(axis=0)
    tmax = y_train.max(axis=0)
    if np.any(tmax == tmin):
        bad = int(np.argmax(tmax == tmin))
        raise NormalizationError(
            f"target task {bad} is constant over the training split; "
            f"min-max normalization undefined")
    net.target_min = tmin
    net.target_max = tmax


def standardize_inputs(net: MtlNetwork, x: np.ndarray) -> np.ndarray:
    return (x - net.input_mean) / net.input_std


def normalize_targets(net: MtlNetwork, y: np.ndarray) -> np.ndarray:
    span = net.target_max - net.target_min
    return NORM_LO + (NORM_HI - NORM_LO) * (y - net.target_min) / span


def denormalize_targets(net: MtlNetwork, y_norm: np.ndarray) -> np.ndarray:
    span = net.target_max - net.target_min
    return net.target_min + (y_norm - NORM_LO) * span / (NORM_HI - NORM_LO)


def _forward_stack(net: MtlNetwork, x_std: np.ndarray):
    acts = [x_std]
    h = x_std
    for w, b in net.hidden:
        h = _sigmoid(h @ w + b)
        acts.append(h)
    out = _sigmoid(h @ (net.out_w * net.mask).T + net.out_b)
    return acts, out


def loss_value(net: MtlNetwork, x: np.ndarray, y_norm: np.ndarray) -> float:
    """Squared error summed over tasks, averaged over the batch."""
    _, out = _forward_stack(net, standardize_inputs(net, x))
    return float(np.mean(np.sum((out - y_norm) ** 2, axis=1)))


def loss_gradients(net: MtlNetwork, x: np.ndarray, y_norm: np.ndarray,
                   norm_count: int | None = None):
    """Backprop gradients in parameters() order, plus the batch loss.

    `norm_count` lets gradient shards normalize by the full batch size so the
    shard sum equals the unsharded gradient.
    """
    count = norm_count if norm_count is not None else x.shape[0]
    acts, out = _forward_stack(net, standardize_inputs(net, x))
    diff = out - y_norm
    loss = float(np.sum(diff ** 2) / x.shape[0])

    # Output layer: gradients confined to each task's window.
    delta = (2.0 / count) * diff * out * (1.0 - out)        # (B, tasks)
    grad_out_w = (delta.T @ acts[-1]) * net.mask
    grad_out_b = delta.sum(axis=0)
    upstream = delta @ (net.out_w * net.mask)

    grads_hidden = []
    for (w, _b), a_prev, a_cur in zip(reversed(net.hidden), reversed(acts[:-1]),
                                      reversed(acts[1:])):
        local = upstream * a_cur * (1.0 - a_cur)
        grads_hidden.append((a_prev.T @ local, local.sum(axis=0)))
        upstream = local @ w.T

    grads: list[np.ndarray] = []
    for gw, gb in reversed(grads_hidden):
        grads.extend((gw, gb))
    grads.extend((grad_out_w, grad_out_b))
    return grads, loss


def _batch_gradients(net: MtlNetwork, xb: np.ndarray, yb: np.ndarray, workers: int):
    if workers <= 1 or xb.shape[0] < 2 * workers:
        return loss_gradients(net, xb, yb)
    shards = np.array_split(np.arange(xb.shape[0]), workers)
    total = xb.shape[0]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(
            lambda s: loss_gradients(net, xb[s], yb[s], norm_count=total), shards))
    # Fixed reduction order: shard 0 first, always.
    grads = [g.copy() for g in parts[0][0]]
    loss = parts[0][1] * (shards[0].size / total)
    for (part_grads, part_loss), shard in zip(parts[1:], shards[1:]):
        for acc, g in zip(grads, part_grads):
            acc += g
        loss += part_loss * (shard.size / total)
    return grads, loss


@dataclass(frozen=True)
class EpochStats:
    """Validation metrics recorded after one fine-tuning epoch."""

    epoch: int
    mape_avg: float
    mape_per_task: tuple[float, ...]
    r2_per_task: tuple[float, ...]


def _regression_stats(y_true: np.ndarray, y_pred: np.ndarray):
    """Per-task MAPE and R^2; rows with any zero target are excluded from
    MAPE and counted. Constant tasks give R^2 = nan here."""
    nonzero = np.all(y_true != 0.0, axis=1)
    excluded = int(np.sum(~nonzero))
    if np.any(nonzero):
        yt, yp = y_true[nonzero], y_pred[nonzero]
        mape = np.mean(np.abs(yp - yt) / np.abs(yt), axis=0)
    else:
        mape = np.full(y_true.shape[1], np.nan)
    ss_res = np.sum((y_pred - y_true) ** 2, axis=0)
    ss_tot = np.sum((y_true - y_true.mean(axis=0)) ** 2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(ss_tot > 0.0, 1.0 - ss_res / ss_tot, np.nan)
    return mape, r2, excluded


def fine_tune(net: MtlNetwork, x_train: np.ndarray, y_train: np.ndarray,
              x_val: np.ndarray, y_val: np.ndarray, cfg: TrainConfig,
              rng: np.random.Generator | None = None):
    """Mini-batch SGD with momentum on the summed-task squared error.

    Targets are normalized with the network's constants (call
    fit_normalization first). Returns (net, per-epoch validation trace).
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    y_norm = normalize_targets(net, y_train)
    params = net.parameters()
    velocity = [np.zeros_like(p) for p in params]
    trace: list[EpochStats] = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(x_train.shape[0])
        for bi, start in enumerate(range(0, order.size, cfg.batch_size)):
            idx = order[start:start + cfg.batch_size]
            grads, loss = _batch_gradients(net, x_train[idx], y_norm[idx],
                                           cfg.grad_workers)
            if not np.isfinite(loss):
                raise TrainingError(
                    f"non-finite loss at epoch {epoch} batch {bi}")
            for p, g, v in zip(params, grads, velocity):
                v *= cfg.momentum
                v -= cfg.finetune_lr * g
                p += v
        if x_val.shape[0]:
            pred, _ = predict_batch(net, x_val)
            mape, r2, _ = _regression_stats(y_val, pred)
        else:
            mape = r2 = np.full(net.tasks, np.nan)
        trace.append(EpochStats(epoch=epoch + 1,
                                mape_avg=float(np.mean(mape)),
                                mape_per_task=tuple(float(v) for v in mape),
                                r2_per_task=tuple(float(v) for v in r2)))
    return net, trace


@dataclass(frozen=True)
class Prediction:
    """De-normalized task predictions with an extrapolation warning flag."""

    values: np.ndarray
    extrapolated: bool


def predict_batch(net: MtlNetwork, x: np.ndarray):
    """(values, extrapolated) for a (B, input_dim) batch of raw inputs."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    _, out = _forward_stack(net, standardize_inputs(net, x))
    values = denormalize_targets(net, out)
    extrapolated = np.any((x < net.input_lo) | (x > net.input_hi), axis=1)
    return values, extrapolated


def predict(net: MtlNetwork, inputs) -> Prediction:
    """Predict the task values for one raw input vector (physical units)."""
    values, extrapolated = predict_batch(net, np.asarray(inputs, dtype=float))
    return Prediction(values=values[0], extrapolated=bool(extrapolated[0]))


@dataclass(frozen=True)
class EvalReport:
    mape_per_task: tuple[float, ...]
    mape_avg: float
    r2_per_task: tuple[float, ...]
    excluded_rows: int


def evaluate(net: MtlNetwork, x: np.ndarray, y: np.ndarray) -> EvalReport:
    """Test-split metrics on de-normalized predictions."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[0] == 0:
        raise EvaluationError("empty evaluation split")
    pred, _ = predict_batch(net, x)
    mape, r2, excluded = _regression_stats(y, pred)
    if np.any(np.isnan(r2)):
        bad = int(np.argmax(np.isnan(r2)))
        raise EvaluationError(
            f"R^2 undefined for task {bad}: true values are constant")
    return EvalReport(mape_per_task=tuple(float(v) for v in mape),
                      mape_avg=float(np.mean(mape)),
                      r2_per_task=tuple(float(v) for v in r2),
                      excluded_rows=excluded)


@dataclass(frozen=True)
class TrainResult:
    net: MtlNetwork
    trace: list
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray


def split_indices(count: int, split, rng: np.random.Generator):
    perm = rng.permutation(count)
    n_train = int(round(split[0] * count))
    n_val = int(round(split[1] * count))
    return perm[:n_train], perm[n_train:n_train + n_val], perm[n_train + n_val:]


def train_surrogate(x: np.ndarray, y: np.ndarray, cfg: TrainConfig,
                    kind: str = "mtl", hidden_widths=(64, 64, 76),
                    window: int = 16, stride: int = 12) -> TrainResult:
    """Full pipeline: seeded split, pretraining (mtl only), fine-tuning.

    Bit-reproducible for a fixed config: the same seed drives the split, the
    layer initialization, CD-1 sampling and the epoch shuffles in a fixed
    consumption order.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if kind not in ("mtl", "dnn"):
        raise ConfigError(f"kind must be 'mtl' or 'dnn', got {kind!r}")
    rng = np.random.default_rng(cfg.seed)
    train_idx, val_idx, test_idx = split_indices(x.shape[0], cfg.split, rng)
    x_tr, y_tr = x[train_idx], y[train_idx]

    if kind == "mtl":
        probe = MtlNetwork(hidden=[], out_w=np.zeros((y.shape[1], x.shape[1])),
                           out_b=np.zeros(y.shape[1]),
                           mask=np.ones((y.shape[1], x.shape[1])),
                           kind="dnn", window=0, stride=0)
        fit_normalization(probe, x_tr, y_tr)
        x_std = standardize_inputs(probe, x_tr)
        rbms = pretrain_dbn(x_std, hidden_widths, cfg, rng)
        net = network_from_rbms(rbms, y.shape[1], window, stride, rng)
        net.input_mean, net.input_std = probe.input_mean, probe.input_std
        net.input_lo, net.input_hi = probe.input_lo, probe.input_hi
        net.target_min, net.target_max = probe.target_min, probe.target_max
    else:
        net = build_dnn_network(x.shape[1], hidden_widths, y.shape[1], rng)
        fit_normalization(net, x_tr, y_tr)

    net, trace = fine_tune(net, x_tr, y_tr, x[val_idx], y[val_idx], cfg, rng)
    return TrainResult(net=net, trace=trace, train_idx=train_idx,
                       val_idx=val_idx, test_idx=test_idx)


def train_baseline_dnn(x: np.ndarray, y: np.ndarray, cfg: TrainConfig,
                       hidden_widths=(64, 64, 76)) -> TrainResult:
    """Fully connected comparison network under the identical protocol."""
    return train_surrogate(x, y, cfg, kind="dnn", hidden_widths=hidden_widths)


# ---------------------------------------------------------------------------
# Checkpoint and trace persistence
# ---------------------------------------------------------------------------

def _fmt_floats(arr) -> str:
    return ",".join(f"{float(v):.17g}" for v in np.asarray(arr).ravel())


def save_checkpoint(net: MtlNetwork, path) -> None:
    """Versioned text header + row-major little-endian float64 weight blocks."""
    lines = [
        CHECKPOINT_MAGIC,
        f"kind={net.kind}",
        f"input_dim={net.input_dim}",
        f"tasks={net.tasks}",
        "hidden_widths=" + ",".join(str(w) for w in net.hidden_widths),
        f"window={net.window}",
        f"stride={net.stride}",
        f"norm_lo={NORM_LO:.17g}",
        f"norm_hi={NORM_HI:.17g}",
        "input_mean=" + _fmt_floats(net.input_mean),
        "input_std=" + _fmt_floats(net.input_std),
        "target_min=" + _fmt_floats(net.target_min),
        "target_max=" + _fmt_floats(net.target_max),
        "input_lo=" + _fmt_floats(net.input_lo),
        "input_hi=" + _fmt_floats(net.input_hi),
        "END",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("ascii"))
        for w, b in net.hidden:
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(net.out_w, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(net.out_b, dtype="<f8").tobytes())


def load_checkpoint(path) -> MtlNetwork:
    with open(path, "rb") as fh:
        header: dict[str, str] = {}
        magic = fh.readline().decode("ascii").rstrip("\n")
        if magic != CHECKPOINT_MAGIC:
            raise ConfigError(f"{path}: not an axlesim checkpoint (got {magic!r})")
        while True:
            line = fh.readline().decode("ascii").rstrip("\n")
            if line == "END":
                break
            if not line or "=" not in line:
                raise ConfigError(f"{path}: malformed checkpoint header line {line!r}")
            key, value = line.split("=", 1)
            header[key] = value
        blob = fh.read()

    kind = header["kind"]
    input_dim = int(header["input_dim"])
    tasks = int(header["tasks"])
    widths = [int(w) for w in header["hidden_widths"].split(",") if w]
    window = int(header["window"])
    stride = int(header["stride"])

    def floats(key, n):
        vals = np.array([float(v) for v in header[key].split(",")])
        if vals.size != n:
            raise ConfigError(f"{path}: field {key} has {vals.size} values, expected {n}")
        return vals

    offset = 0

    def take(shape):
        nonlocal offset
        n = int(np.prod(shape))
        arr = np.frombuffer(blob, dtype="<f8", count=n, offset=offset).reshape(shape)
        offset += n * 8
        return arr.astype(float)  # writable copy in native order

    hidden = []
    fan_in = input_dim
    for width in widths:
        hidden.append((take((fan_in, width)), take((width,))))
        fan_in = width
    out_w = take((tasks, fan_in))
    out_b = take((tasks,))
    if offset != len(blob):
        raise ConfigError(f"{path}: {len(blob) - offset} trailing bytes in checkpoint")

    mask = (window_mask(tasks, fan_in, window, stride) if kind == "mtl"
            else np.ones((tasks, fan_in)))
    return MtlNetwork(
        hidden=hidden, out_w=out_w, out_b=out_b, mask=mask, kind=kind,
        window=window, stride=stride,
        input_mean=floats("input_mean", input_dim),
        input_std=floats("input_std", input_dim),
        target_min=floats("target_min", tasks),
        target_max=floats("target_max", tasks),
        input_lo=floats("input_lo", input_dim),
        input_hi=floats("input_hi", input_dim),
    )


def write_trace_csv(trace, path) -> None:
    """Columns: epoch, mape_avg, per-task MAPE, per-task R^2."""
    tasks = len(trace[0].mape_per_task) if trace else 6
    cols = (["epoch", "mape_avg"]
            + [f"mape_task{i + 1}" for i in range(tasks)]
            + [f"r2_task{i + 1}" for i in range(tasks)])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for st in trace:
            row = [str(st.epoch), f"{st.mape_avg:.17g}"]
            row += [f"{v:.17g}" for v in st.mape_per_task]
            row += [f"{v:.17g}" for v in st.r2_per_task]
            fh.write(",".join(row) + "\n")


def read_trace_csv(path):
    """Return (epochs, mape_avg, mape_per_task, r2_per_task) arrays."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        body = fh.read()
    tasks = (len(header) - 2) // 2
    if not body.strip():
        return (np.zeros(0, dtype=int), np.zeros(0),
                np.zeros((0, tasks)), np.zeros((0, tasks)))
    data = np.loadtxt(body.splitlines(), delimiter=",", ndmin=2)
    return (data[:, 0].astype(int), data[:, 1],
            data[:, 2:2 + tasks], data[:, 2 + tasks:])
