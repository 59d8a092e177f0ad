"""Surrogate-gradient training: BPTT, Adam, QAT epoch, k-fold harness.

The hard spike has no useful derivative, so the backward pass substitutes a
Gaussian surrogate evaluated at the distance from threshold. Temporal credit
flows through the membrane carry (identity on non-spiking steps) and is
severed through the reset. The backward recurrence per IF layer, iterating
k = T..1 with gV_{T+1} = 0:

    gJ_k = gV_{k+1} * c_k
    gV_k = gV_{k+1} * c_k + gS_k * surrogate(V_k - 1)

with carry factor c_k = 1 - S_k in hard mode (c_k = 1 in the relaxed mode,
where the same recurrence is exact). Layers are processed sigma3 -> sigma2
-> sigma1, since each layer's gS comes from the next layer's gJ.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import stratified_folds
from .errors import InvalidInput, NonFiniteGradient, StratificationError
from .quant import quantize
from .snn import (
    THRESHOLD,
    WEIGHT_NAMES,
    SnnModel,
    forward_batch,
    init_model,
    resolve_weights,
    unpool_scatter,
)

GAIN_AT_THRESHOLD = 1.0 / np.sqrt(2.0 * np.pi)


def surrogate_gain(x: np.ndarray) -> np.ndarray:
    """Gaussian surrogate derivative: (1/sqrt(2 pi)) exp(-2 x^2).

    Even in x, peaks at x = 0 with value 1/sqrt(2 pi) ~= 0.398942.
    """
    return GAIN_AT_THRESHOLD * np.exp(-2.0 * np.square(x))


def spike_backward(grad_out: np.ndarray, v_pre: np.ndarray) -> np.ndarray:
    """Backward of the spike nonlinearity: grad_out * surrogate(v_pre - 1).

    v_pre is the pre-update membrane potential the spike decision read; the
    gain peaks exactly at the firing threshold.
    """
    grad_out = np.asarray(grad_out, dtype=np.float64)
    v_pre = np.asarray(v_pre, dtype=np.float64)
    if grad_out.shape != v_pre.shape:
        raise InvalidInput(
            f"grad shape {grad_out.shape} does not match v_pre {v_pre.shape}"
        )
    return grad_out * surrogate_gain(v_pre - THRESHOLD)


def cross_entropy(probs: np.ndarray, labels: np.ndarray) -> float:
    """Mean negative log-likelihood of the true class."""
    p = probs[np.arange(probs.shape[0]), labels]
    return float(-np.mean(np.log(np.maximum(p, 1e-300))))


def _layer_time_backward(g_spikes, v_pre, spikes, relaxed: bool):
    """Run the per-layer adjoint recurrence over time.

    Args:
        g_spikes: (T, ...) adjoint of each step's spike output.
        v_pre: (T, ...) pre-update potentials.
        spikes: (T, ...) emitted spikes (ignored when relaxed).
        relaxed: carry factor 1 instead of (1 - S).

    Returns:
        g_drive: (T, ...) adjoint of each step's input drive J_k.
    """
    t = g_spikes.shape[0]
    g_drive = np.empty_like(g_spikes)
    g_v_next = np.zeros_like(g_spikes[0])
    scratch = np.empty_like(g_v_next)
    for k in range(t - 1, -1, -1):
        gd = g_drive[k]
        np.copyto(gd, g_v_next)
        if not relaxed:
            np.copyto(gd, 0.0, where=(spikes[k] != 0))
        # fused surrogate term: g_spikes * gain(v_pre - 1), built in scratch
        np.subtract(v_pre[k], THRESHOLD, out=scratch)
        np.square(scratch, out=scratch)
        scratch *= -2.0
        np.exp(scratch, out=scratch)
        scratch *= GAIN_AT_THRESHOLD
        scratch *= g_spikes[k]
        np.add(gd, scratch, out=g_v_next)
    return g_drive


def backprop_through_time(
    model: SnnModel,
    bits: np.ndarray,
    labels: np.ndarray,
    use_quantized_forward: bool = False,
    mode: str = "hard",
    weights: dict | None = None,
):
    """Gradients of the mean cross-entropy on softmax(A) for one batch.

    When use_quantized_forward is set, the forward (and the linear-map
    Jacobians of the backward, which must match the forward graph) use the
    dequantized view, while the returned gradients apply to the
    full-precision master weights (straight-through estimator for the
    quantizer).

    Returns:
        (grads, loss, probs) with grads keyed like model.weights.
    """
    bits = np.asarray(bits)
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] != bits.shape[0]:
        raise InvalidInput("labels must be 1-D, one per batch example")
    if labels.dtype.kind not in "iu":
        raise InvalidInput("labels must be integers")
    labels = labels.astype(np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= model.n_classes):
        raise InvalidInput(
            f"labels outside [0, {model.n_classes}): "
            f"[{labels.min()}, {labels.max()}]"
        )
    if weights is None:
        weights = resolve_weights(model, use_quantized_forward)
    out = forward_batch(model, bits, mode=mode, want_tape=True, weights=weights)
    tape = out.tape
    b = bits.shape[0]
    t = model.t_inf
    relaxed = mode == "relaxed"
    w_fc1, w_fc2 = weights["fc1"], weights["fc2"]

    loss = cross_entropy(out.probs, labels)
    g_acc = out.probs.copy()
    g_acc[np.arange(b), labels] -= 1.0
    g_acc /= b

    # sigma3: the accumulator is a plain sum, so every step's spike output
    # shares the same adjoint.
    g_s3 = np.broadcast_to(g_acc, (t,) + g_acc.shape)
    g_j3 = _layer_time_backward(
        np.ascontiguousarray(g_s3, dtype=np.float64), tape.v3_pre, tape.s3, relaxed
    )

    # sigma2
    g_s2 = g_j3.reshape(t * b, -1) @ w_fc2
    g_s2 = g_s2.reshape(t, b, -1)
    g_j2 = _layer_time_backward(g_s2, tape.v2_pre, tape.s2, relaxed)

    # pool routing and sigma1; time folds into the batch axis for the scatter
    g_flat = g_j2.reshape(t * b, -1) @ w_fc1
    c1, oh, ow = model.shape_after_conv()
    ph, pw = oh // 2, ow // 2
    g_pooled = g_flat.reshape(t * b, c1, ph, pw)
    g_s1 = unpool_scatter(
        g_pooled, tape.route.reshape(t * b, c1, ph, pw), (oh, ow)
    ).reshape(t, b, c1, oh, ow)
    g_j1 = _layer_time_backward(g_s1, tape.v1_pre, tape.s1, relaxed)

    # weight gradients; the conv layer is first, so no input gradient needed
    s2_flat = np.ascontiguousarray(tape.s2.reshape(t * b, -1), dtype=np.float64)
    g_w3 = g_j3.reshape(t * b, -1).T @ s2_flat
    flat_flat = np.ascontiguousarray(tape.flat.reshape(t * b, -1), dtype=np.float64)
    g_w2 = g_j2.reshape(t * b, -1).T @ flat_flat
    # tape.cols is time-major (t*b*oh*ow, c*kh*kw); order g_j1 to match
    g_j1_2d = np.ascontiguousarray(g_j1.transpose(0, 1, 3, 4, 2)).reshape(-1, c1)
    g_w1_2d = g_j1_2d.T @ tape.cols
    grads = {
        "conv": g_w1_2d.reshape(model.weights["conv"].shape),
        "fc1": g_w2,
        "fc2": g_w3,
    }
    return grads, loss, out.probs


# ---------------------------------------------------------------------------
# optimizer


@dataclass
class AdamState:
    """First/second moment estimates and the step counter."""

    m: dict
    v: dict
    t: int = 0

    @staticmethod
    def for_weights(weights: dict) -> "AdamState":
        return AdamState(
            m={n: np.zeros_like(w) for n, w in weights.items()},
            v={n: np.zeros_like(w) for n, w in weights.items()},
        )


def adam_step(
    weights: dict,
    grads: dict,
    state: AdamState,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
):
    """Standard bias-corrected Adam update, in place on weights and state."""
    for name, g in grads.items():
        if not np.isfinite(g).all():
            raise NonFiniteGradient(f"non-finite gradient in {name!r}")
    state.t += 1
    c1 = 1.0 - beta1 ** state.t
    c2 = 1.0 - beta2 ** state.t
    for name in weights:
        g = grads[name]
        state.m[name] = beta1 * state.m[name] + (1.0 - beta1) * g
        state.v[name] = beta2 * state.v[name] + (1.0 - beta2) * np.square(g)
        m_hat = state.m[name] / c1
        v_hat = state.v[name] / c2
        weights[name] -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return weights, state


# ---------------------------------------------------------------------------
# cross-validation harness


@dataclass
class TrainConfig:
    """Training protocol: Adam 1e-3, batch 64, 14 full + 1 QAT epoch,
    6-fold cross-validation, 4-bit deployment weights."""

    lr: float = 1e-3
    batch: int = 64
    epochs_full: int = 14
    epochs_qat: int = 1
    folds: int = 6
    seed: int = 0
    bits: int = 4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if not self.lr > 0.0:
            raise InvalidInput("lr must be > 0")
        if self.epochs_full < 0 or self.epochs_qat < 0:
            raise InvalidInput("epoch counts must be >= 0")
        if self.folds < 2:
            raise InvalidInput("folds must be >= 2")
        if self.batch < 1:
            raise InvalidInput("batch must be >= 1")
        if not (2 <= self.bits <= 8):
            raise InvalidInput(f"bits must be in [2, 8], got {self.bits}")

    def to_dict(self) -> dict:
        return {
            "lr": self.lr, "batch": self.batch,
            "epochs_full": self.epochs_full, "epochs_qat": self.epochs_qat,
            "folds": self.folds, "seed": self.seed, "bits": self.bits,
            "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps,
        }


@dataclass
class FoldReport:
    """Cross-validation outcome: per-fold accuracy, aggregate confusion
    matrix over all validation folds, and per-fold loss curves."""

    fold_accuracies: list
    confusion: np.ndarray
    loss_curves: list
    n_classes: int
    bits: int
    seed: int

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))

    @property
    def std_accuracy(self) -> float:
        return float(np.std(self.fold_accuracies))

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "spikeradar-fold-report",
                "version": 1,
                "fold_accuracies": self.fold_accuracies,
                "mean_accuracy": self.mean_accuracy,
                "std_accuracy": self.std_accuracy,
                "confusion": self.confusion.tolist(),
                "loss_curves": self.loss_curves,
                "n_classes": self.n_classes,
                "bits": self.bits,
                "seed": self.seed,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "FoldReport":
        d = json.loads(text)
        return FoldReport(
            fold_accuracies=d["fold_accuracies"],
            confusion=np.asarray(d["confusion"], dtype=np.int64),
            loss_curves=d["loss_curves"],
            n_classes=d["n_classes"],
            bits=d["bits"],
            seed=d["seed"],
        )


def _batches(indices: np.ndarray, batch: int):
    for i in range(0, len(indices), batch):
        yield indices[i : i + batch]


def _quantize_all(weights: dict, bits: int) -> dict:
    return {name: quantize(w, bits) for name, w in weights.items()}


def evaluate(model: SnnModel, bits: np.ndarray, labels: np.ndarray,
             use_quantized: bool = True, batch: int = 128):
    """Accuracy and confusion matrix (rows true, cols predicted)."""
    n = bits.shape[0]
    confusion = np.zeros((model.n_classes, model.n_classes), dtype=np.int64)
    correct = 0
    for idx in _batches(np.arange(n), batch):
        out = forward_batch(model, bits[idx], use_quantized=use_quantized)
        preds = np.argmax(out.probs, axis=1)
        correct += int((preds == labels[idx]).sum())
        np.add.at(confusion, (labels[idx], preds), 1)
    return correct / n, confusion


def train(model: SnnModel, dataset, cfg: TrainConfig):
    """k-fold cross-validation training.

    Args:
        model: architecture template; each fold trains a fresh
            reinitialization of it (seeded from cfg.seed and the fold index).
        dataset: (bits, labels) with bits of shape (N, T, C, H, W) in {0, 1}
            and integer labels in [0, n_classes).
        cfg: protocol knobs.

    Per fold: epochs_full full-precision Adam epochs, then epochs_qat epochs
    with the forward on weights re-quantized from the updated master before
    every batch; the fold model is then quantized once more from the final
    master and evaluated with the quantized forward on the held-out fold.

    Returns:
        (best_model, report): the fold model with the highest validation
        accuracy (ties to the lowest fold index), carrying its quantized
        view and a provenance record, plus the aggregate FoldReport.
    """
    bits, labels = dataset
    bits = np.asarray(bits)
    labels = np.asarray(labels)
    if bits.ndim != 5 or bits.shape[0] == 0:
        raise InvalidInput("dataset must be non-empty (N, T, C, H, W) spikes")
    if labels.shape != (bits.shape[0],):
        raise InvalidInput("labels must be 1-D, one per example")
    if labels.dtype.kind not in "iu":
        raise InvalidInput("labels must be integers")
    labels = labels.astype(np.int64)
    if labels.min() < 0 or labels.max() >= model.n_classes:
        raise InvalidInput(
            f"labels outside [0, {model.n_classes}) for this model"
        )

    fold_ids = stratified_folds(labels, folds=cfg.folds, seed=cfg.seed)
    classes = np.unique(labels)

    accuracies = []
    loss_curves = []
    confusion = np.zeros((model.n_classes, model.n_classes), dtype=np.int64)
    best = None

    for fold in range(cfg.folds):
        val_mask = fold_ids == fold
        train_idx = np.flatnonzero(~val_mask)
        val_idx = np.flatnonzero(val_mask)
        present = np.unique(labels[train_idx])
        if len(present) != len(classes):
            missing = sorted(set(classes.tolist()) - set(present.tolist()))
            raise StratificationError(
                f"fold {fold}: classes {missing} absent from the training split"
            )

        m = init_model(
            input_shape=model.input_shape,
            n_classes=model.n_classes,
            t_inf=model.t_inf,
            seed=[cfg.seed, fold, 0],
            hidden=model.hidden,
            conv_channels=model.conv_channels,
            kernel=model.kernel,
            fire_mode=model.fire_mode,
        )
        shuffle_rng = np.random.default_rng([cfg.seed, fold, 1])
        adam = AdamState.for_weights(m.weights)
        curve = []

        for _ in range(cfg.epochs_full):
            perm = shuffle_rng.permutation(train_idx)
            loss_sum = 0.0
            for batch_idx in _batches(perm, cfg.batch):
                grads, loss, _ = backprop_through_time(
                    m, bits[batch_idx], labels[batch_idx]
                )
                adam_step(m.weights, grads, adam, lr=cfg.lr,
                          beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
                loss_sum += loss * len(batch_idx)
            curve.append(loss_sum / len(train_idx))

        for _ in range(cfg.epochs_qat):
            perm = shuffle_rng.permutation(train_idx)
            loss_sum = 0.0
            for batch_idx in _batches(perm, cfg.batch):
                # The quantized view is rebuilt from the just-updated master
                # before every batch, never reused stale.
                m.quantized = _quantize_all(m.weights, cfg.bits)
                grads, loss, _ = backprop_through_time(
                    m, bits[batch_idx], labels[batch_idx],
                    use_quantized_forward=True,
                )
                adam_step(m.weights, grads, adam, lr=cfg.lr,
                          beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
                loss_sum += loss * len(batch_idx)
            curve.append(loss_sum / len(train_idx))

        m.quantized = _quantize_all(m.weights, cfg.bits)
        acc, fold_confusion = evaluate(
            m, bits[val_idx], labels[val_idx], use_quantized=True,
            batch=cfg.batch,
        )
        accuracies.append(acc)
        loss_curves.append(curve)
        confusion += fold_confusion
        if best is None or acc > best[0]:
            m.provenance = {
                "trained_on": "fold-cv",
                "fold": fold,
                "config": cfg.to_dict(),
                "n_examples": int(bits.shape[0]),
            }
            best = (acc, m)

    report = FoldReport(
        fold_accuracies=accuracies,
        confusion=confusion,
        loss_curves=loss_curves,
        n_classes=model.n_classes,
        bits=cfg.bits,
        seed=cfg.seed,
    )
    return best[1], report
