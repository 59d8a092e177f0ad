"""Integrate-and-fire network engine.

Architecture (fixed order, three IF layers): conv 5x5x12 (stride 1, no
padding, no bias) -> IF sigma1 -> 2x2/2 max-pool on spikes -> flatten ->
dense -> IF sigma2 -> dense -> IF sigma3 -> per-class spike accumulator A
over T_inf steps -> softmax once at the end.

Neuron semantics are the literal compare-then-integrate state machine:

    if V_k <  1:  V_{k+1} = max(0, V_k + J_k),  S_k = 0
    if V_k >= 1:  V_{k+1} = 0 (input discarded), S_k = 1

so a neuron spikes the step AFTER its potential crossed threshold. The
common integrate-then-fire variant is available behind the fire_mode flag
for ablation only.

The engine also has a "relaxed" mode where the hard spike is replaced by
the smooth map (1/4) erf(sqrt(2) (V - 1)) + 1/4 and reset/clamp are
disabled; in that mode the network is differentiable and the training
module's backward recurrence is exact, which is how the gradient machinery
is verified against finite differences.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import erf

from .container import read_tensor_from, write_tensor_to
from .encoding import SpikeTensor
from .errors import InvalidInput, MissingQuantizedWeights
from .quant import QuantizedTensor, dequantize

THRESHOLD = 1.0

FIRE_MODES = ("compare_then_integrate", "integrate_then_fire")

# Weight tensor names in model order. sigma1..sigma3 are the IF layers after
# conv, fc1, and fc2 respectively.
WEIGHT_NAMES = ("conv", "fc1", "fc2")


@dataclass(frozen=True)
class IfState:
    """Membrane potentials of one IF layer (threshold-normalized)."""

    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64)
        object.__setattr__(self, "v", v)
        if not np.isfinite(v).all():
            raise InvalidInput("membrane potentials must be finite")
        if v.size and v.min() < 0:
            raise InvalidInput("membrane potentials must be >= 0")


@dataclass(frozen=True)
class LayerSpec:
    """One stage of the network; IF nonlinearities are implicit after
    conv2d and dense stages (the accumulator has none)."""

    kind: str
    out_channels: int | None = None
    kernel: tuple[int, int] | None = None
    stride: int = 1
    padding: int = 0
    pool: tuple[int, int] | None = None
    pool_stride: int | None = None
    in_features: int | None = None
    out_features: int | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["kernel"] is not None:
            d["kernel"] = list(d["kernel"])
        if d["pool"] is not None:
            d["pool"] = list(d["pool"])
        return d

    @staticmethod
    def from_dict(d: dict) -> "LayerSpec":
        d = dict(d)
        if d.get("kernel") is not None:
            d["kernel"] = tuple(d["kernel"])
        if d.get("pool") is not None:
            d["pool"] = tuple(d["pool"])
        return LayerSpec(**d)


@dataclass
class SnnModel:
    """Weights plus architecture description.

    weights maps "conv" -> (C_out, C_in, kh, kw), "fc1" -> (hidden, flat),
    "fc2" -> (n_classes, hidden), all float64, no biases anywhere.
    quantized, when set, holds the integer deployment view of each tensor.
    """

    layers: list
    weights: dict
    t_inf: int
    input_shape: tuple[int, int, int]
    n_classes: int
    hidden: int
    conv_channels: int
    kernel: tuple[int, int]
    fire_mode: str = "compare_then_integrate"
    quantized: dict | None = None
    provenance: dict | None = None

    def __post_init__(self):
        if self.fire_mode not in FIRE_MODES:
            raise InvalidInput(f"unknown fire_mode {self.fire_mode!r}")
        if self.t_inf < 1:
            raise InvalidInput("t_inf must be >= 1")
        shapes = expected_weight_shapes(
            self.input_shape, self.n_classes, self.conv_channels, self.kernel,
            self.hidden,
        )
        for name in WEIGHT_NAMES:
            if name not in self.weights:
                raise InvalidInput(f"missing weight tensor {name!r}")
            got = self.weights[name].shape
            if got != shapes[name]:
                raise InvalidInput(
                    f"weight {name!r} has shape {got}, expected {shapes[name]}"
                )

    @property
    def quantized_bits(self) -> int | None:
        if not self.quantized:
            return None
        return next(iter(self.quantized.values())).bits

    def shape_after_conv(self) -> tuple[int, int, int]:
        _, h, w = self.input_shape
        kh, kw = self.kernel
        return (self.conv_channels, h - kh + 1, w - kw + 1)

    def shape_after_pool(self) -> tuple[int, int, int]:
        c, h, w = self.shape_after_conv()
        return (c, h // 2, w // 2)

    def flat_features(self) -> int:
        c, h, w = self.shape_after_pool()
        return c * h * w


def expected_weight_shapes(input_shape, n_classes, conv_channels, kernel, hidden):
    c_in, h, w = input_shape
    kh, kw = kernel
    oh, ow = h - kh + 1, w - kw + 1
    if oh < 2 or ow < 2:
        raise InvalidInput(
            f"input {h}x{w} too small for {kh}x{kw} conv followed by 2x2 pool"
        )
    flat = conv_channels * (oh // 2) * (ow // 2)
    return {
        "conv": (conv_channels, c_in, kh, kw),
        "fc1": (hidden, flat),
        "fc2": (n_classes, hidden),
    }


def build_layers(input_shape, n_classes, conv_channels, kernel, hidden):
    shapes = expected_weight_shapes(input_shape, n_classes, conv_channels, kernel, hidden)
    flat = shapes["fc1"][1]
    return [
        LayerSpec("conv2d", out_channels=conv_channels, kernel=kernel,
                  stride=1, padding=0),
        LayerSpec("maxpool", pool=(2, 2), pool_stride=2),
        LayerSpec("flatten"),
        LayerSpec("dense", in_features=flat, out_features=hidden),
        LayerSpec("dense", in_features=hidden, out_features=n_classes),
        LayerSpec("accumulator"),
    ]


def init_model(
    input_shape: tuple[int, int, int] = (1, 48, 100),
    n_classes: int = 5,
    t_inf: int = 4,
    seed: int = 0,
    hidden: int = 128,
    conv_channels: int = 12,
    kernel: tuple[int, int] = (5, 5),
    fire_mode: str = "compare_then_integrate",
) -> SnnModel:
    """Fresh model with Glorot-uniform weights, +-sqrt(6/(fan_in+fan_out))."""
    shapes = expected_weight_shapes(input_shape, n_classes, conv_channels, kernel, hidden)
    rng = np.random.default_rng(seed)
    kh, kw = kernel
    fans = {
        "conv": (input_shape[0] * kh * kw, conv_channels * kh * kw),
        "fc1": (shapes["fc1"][1], shapes["fc1"][0]),
        "fc2": (shapes["fc2"][1], shapes["fc2"][0]),
    }
    weights = {}
    for name in WEIGHT_NAMES:
        fan_in, fan_out = fans[name]
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        weights[name] = rng.uniform(-lim, lim, size=shapes[name])
    return SnnModel(
        layers=build_layers(input_shape, n_classes, conv_channels, kernel, hidden),
        weights=weights,
        t_inf=t_inf,
        input_shape=tuple(input_shape),
        n_classes=n_classes,
        hidden=hidden,
        conv_channels=conv_channels,
        kernel=tuple(kernel),
        fire_mode=fire_mode,
    )


# ---------------------------------------------------------------------------
# neuron update


def _if_update(v: np.ndarray, drive: np.ndarray, fire_mode: str):
    """One IF step. Returns (v_next, spikes) with spikes as a bool array.

    The spike decision reads the PRE-update potential; on a spiking step the
    incoming drive is discarded entirely. Negative potentials (possible with
    negative weights) are clamped to 0 after the update.
    """
    if fire_mode == "compare_then_integrate":
        spikes = v >= THRESHOLD
        v_next = v + drive
        np.maximum(v_next, 0.0, out=v_next)
        np.copyto(v_next, 0.0, where=spikes)
    elif fire_mode == "integrate_then_fire":
        v_next = v + drive
        spikes = v_next >= THRESHOLD
        np.maximum(v_next, 0.0, out=v_next)
        np.copyto(v_next, 0.0, where=spikes)
    else:
        raise InvalidInput(f"unknown fire_mode {fire_mode!r}")
    return v_next, spikes


def if_step(state: IfState, drive: np.ndarray,
            fire_mode: str = "compare_then_integrate"):
    """Public single-step IF update: (state, drive) -> (next state, spikes)."""
    drive = np.asarray(drive, dtype=np.float64)
    if drive.shape != state.v.shape:
        raise InvalidInput(
            f"drive shape {drive.shape} does not match state shape {state.v.shape}"
        )
    v_next, spikes = _if_update(state.v, drive, fire_mode)
    return IfState(v=v_next), spikes.astype(np.uint8)


def relaxed_spike(v: np.ndarray) -> np.ndarray:
    """Smooth stand-in for the hard threshold, used by the relaxed mode.

    (1/4) erf(sqrt(2) (v - 1)) + 1/4, whose derivative is the Gaussian
    surrogate (1/sqrt(2 pi)) exp(-2 (v - 1)^2).
    """
    return 0.25 * erf(np.sqrt(2.0) * (v - THRESHOLD)) + 0.25


# ---------------------------------------------------------------------------
# linear stages


def im2col_patches(x: np.ndarray, kh: int, kw: int) -> np.ndarray:
    """Gather conv patches: (B, C, H, W) -> (B*OH*OW, C*kh*kw) float64.

    Column order is (channel, kernel row, kernel col) flattened row-major,
    matching weights reshaped as (C_out, C_in*kh*kw).
    """
    b, c, h, w = x.shape
    oh, ow = h - kh + 1, w - kw + 1
    s0, s1, s2, s3 = x.strides
    patches = np.lib.stride_tricks.as_strided(
        x, shape=(b, c, oh, ow, kh, kw), strides=(s0, s1, s2, s3, s2, s3)
    )
    cols = np.ascontiguousarray(patches.transpose(0, 2, 3, 1, 4, 5), dtype=np.float64)
    return cols.reshape(b * oh * ow, c * kh * kw)


def conv2d_drive(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Valid cross-correlation, stride 1, no bias: input drive of sigma1."""
    b, c, h, w_in = x.shape
    c_out, c_in, kh, kw = w.shape
    if c != c_in:
        raise InvalidInput(f"input has {c} channels, conv expects {c_in}")
    oh, ow = h - kh + 1, w_in - kw + 1
    cols = im2col_patches(x, kh, kw)
    out = cols @ w.reshape(c_out, -1).T
    return out.reshape(b, oh, ow, c_out).transpose(0, 3, 1, 2)


def dense_drive(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """x (B, in) @ w (out, in)^T -> (B, out)."""
    return np.ascontiguousarray(x, dtype=np.float64) @ w.T


def maxpool_spikes(spikes: np.ndarray) -> np.ndarray:
    """2x2/stride-2 max (logical OR for binary inputs) over the last two dims.

    Odd trailing rows/columns are truncated.
    """
    pooled, _ = _maxpool_route(np.asarray(spikes), want_route=False)
    return pooled


def _maxpool_route(x: np.ndarray, want_route: bool = True):
    """Pool and (optionally) record which window position (row-major 0..3) won.

    Routing is first-index-wins like np.argmax, so ties (and all-zero
    windows) route to the lowest index: top-left for empty windows. Forward
    passes that will never backpropagate skip the routing computation.
    """
    h, w = x.shape[-2], x.shape[-1]
    if h < 2 or w < 2:
        raise InvalidInput(f"spatial dims {h}x{w} smaller than 2x2 pool window")
    q0 = x[..., 0 : (h // 2) * 2 : 2, 0 : (w // 2) * 2 : 2]
    q1 = x[..., 0 : (h // 2) * 2 : 2, 1 : (w // 2) * 2 : 2]
    q2 = x[..., 1 : (h // 2) * 2 : 2, 0 : (w // 2) * 2 : 2]
    q3 = x[..., 1 : (h // 2) * 2 : 2, 1 : (w // 2) * 2 : 2]
    pooled = np.maximum(np.maximum(q0, q1), np.maximum(q2, q3))
    if not want_route:
        return pooled, None
    route = np.full(pooled.shape, 3, dtype=np.int8)
    np.copyto(route, 2, where=(q2 == pooled))
    np.copyto(route, 1, where=(q1 == pooled))
    np.copyto(route, 0, where=(q0 == pooled))
    return pooled, route


def unpool_scatter(grad_pooled: np.ndarray, route: np.ndarray,
                   spatial: tuple[int, int]) -> np.ndarray:
    """Scatter pooled-cell gradients back to the routed input positions.

    grad_pooled and route have shape (B, C, PH, PW); output is (B, C, H, W)
    with zeros everywhere except each window's routed position. Truncated
    odd rows/columns receive zero.
    """
    b, c, ph, pw = grad_pooled.shape
    h, w = spatial
    out = np.zeros((b, c, h, w), dtype=grad_pooled.dtype)
    for q in range(4):
        view = out[..., (q >> 1) :: 2, (q & 1) :: 2][..., :ph, :pw]
        np.copyto(view, grad_pooled, where=(route == q))
    return out


def softmax(a: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax."""
    z = a - a.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# forward pass


@dataclass(frozen=True)
class ForwardTrace:
    """Per-inference record: accumulator and spike counts.

    spike_counts has keys "input", "sigma1", "sigma2", "sigma3"; pooling
    passes spikes through and is not counted separately.
    """

    accumulator: np.ndarray
    spike_counts: dict
    per_step_spikes: np.ndarray | None = None

    @property
    def total_spikes(self) -> int:
        return int(sum(self.spike_counts.values()))


@dataclass
class Tape:
    """Per-step forward state retained for backpropagation through time.

    Arrays are stacked over the step axis: v*_pre are the pre-update
    potentials each spike decision read, s* the emitted spikes (float in
    relaxed mode), route the pool routing, flat the flattened pooled spikes.
    """

    bits: np.ndarray
    v1_pre: np.ndarray
    s1: np.ndarray
    route: np.ndarray
    flat: np.ndarray
    v2_pre: np.ndarray
    s2: np.ndarray
    v3_pre: np.ndarray
    s3: np.ndarray
    accumulator: np.ndarray
    probs: np.ndarray
    weights: dict
    mode: str
    fire_mode: str
    # im2col view of the whole batch-time input, (T*B*OH*OW, C*kh*kw),
    # kept so the backward conv-weight GEMM does not regather patches
    cols: np.ndarray | None = None


@dataclass
class BatchForward:
    """Result of a batched forward pass."""

    probs: np.ndarray
    accumulator: np.ndarray
    spike_counts: dict
    per_step_spikes: np.ndarray
    tape: Tape | None = None


def resolve_weights(model: SnnModel, use_quantized: bool) -> dict:
    """Weights the forward pass should use: master or dequantized view."""
    if not use_quantized:
        return model.weights
    if not model.quantized:
        raise MissingQuantizedWeights(
            "model has no quantized view; quantize it or drop use_quantized"
        )
    return {name: dequantize(model.quantized[name]) for name in WEIGHT_NAMES}


def forward_batch(
    model: SnnModel,
    bits: np.ndarray,
    use_quantized: bool = False,
    mode: str = "hard",
    want_tape: bool = False,
    weights: dict | None = None,
) -> BatchForward:
    """Run the network over a batch of spike tensors.

    Args:
        bits: (B, T, C, H, W) binary input, T = model.t_inf.
        use_quantized: forward on the dequantized integer view.
        mode: "hard" (production spiking dynamics) or "relaxed" (smooth
            spike, no reset/clamp; for gradient verification).
        want_tape: retain per-step state for the backward pass.
        weights: override the resolved weights (the trainer passes the
            current view explicitly).

    Returns:
        BatchForward; probs has shape (B, n_classes). IF states start at 0
        for every call and are never carried across inputs.
    """
    bits = np.asarray(bits)
    if bits.ndim != 5:
        raise InvalidInput("batch must be 5-D (batch, time, channel, h, w)")
    b = bits.shape[0]
    if bits.shape[1] != model.t_inf:
        raise InvalidInput(
            f"input has {bits.shape[1]} steps, model expects {model.t_inf}"
        )
    if tuple(bits.shape[2:]) != tuple(model.input_shape):
        raise InvalidInput(
            f"input spatial shape {bits.shape[2:]} does not match model "
            f"input {model.input_shape}"
        )
    if mode not in ("hard", "relaxed"):
        raise InvalidInput(f"unknown forward mode {mode!r}")
    if weights is None:
        weights = resolve_weights(model, use_quantized)
    w_conv, w_fc1, w_fc2 = (weights[n] for n in WEIGHT_NAMES)

    c1, oh, ow = model.shape_after_conv()
    ph, pw = oh // 2, ow // 2
    flat_n = model.flat_features()
    t = model.t_inf
    hard = mode == "hard"
    spike_dtype = np.uint8 if hard else np.float64

    v1 = np.zeros((b, c1, oh, ow))
    v2 = np.zeros((b, model.hidden))
    v3 = np.zeros((b, model.n_classes))
    acc = np.zeros((b, model.n_classes))

    # The conv drive depends on the input alone, not on IF state, so all
    # steps share one patch gather and one GEMM up front. Time-major layout
    # keeps each step's slice contiguous.
    kh, kw = model.kernel
    x_tb = np.ascontiguousarray(bits.transpose(1, 0, 2, 3, 4)).reshape(
        t * b, *model.input_shape
    )
    cols = im2col_patches(x_tb, kh, kw)
    j1_steps = (cols @ w_conv.reshape(c1, -1).T).reshape(
        t, b, oh, ow, c1
    ).transpose(0, 1, 4, 2, 3)

    tape = None
    if want_tape:
        tape = Tape(
            bits=bits,
            v1_pre=np.empty((t, b, c1, oh, ow)),
            s1=np.empty((t, b, c1, oh, ow), dtype=spike_dtype),
            route=np.empty((t, b, c1, ph, pw), dtype=np.int8),
            flat=np.empty((t, b, flat_n), dtype=spike_dtype),
            v2_pre=np.empty((t, b, model.hidden)),
            s2=np.empty((t, b, model.hidden), dtype=spike_dtype),
            v3_pre=np.empty((t, b, model.n_classes)),
            s3=np.empty((t, b, model.n_classes), dtype=spike_dtype),
            accumulator=acc,
            probs=np.empty((b, model.n_classes)),
            weights=weights,
            mode=mode,
            fire_mode=model.fire_mode,
            cols=cols,
        )

    n_s1 = np.zeros(b, dtype=np.int64)
    n_s2 = np.zeros(b, dtype=np.int64)
    n_s3 = np.zeros(b, dtype=np.int64)
    per_step = np.zeros((t, 4), dtype=np.int64)

    for k in range(t):
        j1 = j1_steps[k]
        if hard:
            v1_next, s1_b = _if_update(v1, j1, model.fire_mode)
            s1 = s1_b.astype(np.uint8)
        else:
            s1 = relaxed_spike(v1)
            v1_next = v1 + j1
        pooled, route = _maxpool_route(s1, want_route=want_tape)
        flat = pooled.reshape(b, -1)
        j2 = dense_drive(flat, w_fc1)
        if hard:
            v2_next, s2_b = _if_update(v2, j2, model.fire_mode)
            s2 = s2_b.astype(np.uint8)
        else:
            s2 = relaxed_spike(v2)
            v2_next = v2 + j2
        j3 = dense_drive(s2, w_fc2)
        if hard:
            v3_next, s3_b = _if_update(v3, j3, model.fire_mode)
            s3 = s3_b.astype(np.uint8)
        else:
            s3 = relaxed_spike(v3)
            v3_next = v3 + j3
        acc += s3

        if want_tape:
            tape.v1_pre[k] = v1
            tape.s1[k] = s1
            tape.route[k] = route
            tape.flat[k] = flat
            tape.v2_pre[k] = v2
            tape.s2[k] = s2
            tape.v3_pre[k] = v3
            tape.s3[k] = s3
        if hard:
            n_s1 += s1.reshape(b, -1).sum(axis=1, dtype=np.int64)
            n_s2 += s2.sum(axis=1, dtype=np.int64)
            n_s3 += s3.sum(axis=1, dtype=np.int64)
            per_step[k, 0] = int(bits[:, k].sum())
            per_step[k, 1] = int(s1.sum())
            per_step[k, 2] = int(s2.sum())
            per_step[k, 3] = int(s3.sum())
        v1, v2, v3 = v1_next, v2_next, v3_next

    probs = softmax(acc)
    n_input = bits.reshape(b, -1).sum(axis=1, dtype=np.int64)
    counts = {"input": n_input, "sigma1": n_s1, "sigma2": n_s2, "sigma3": n_s3}
    if want_tape:
        tape.probs = probs
    return BatchForward(
        probs=probs,
        accumulator=acc,
        spike_counts=counts,
        per_step_spikes=per_step,
        tape=tape,
    )


def forward(model: SnnModel, tensor: SpikeTensor, use_quantized: bool = False,
            per_step: bool = False):
    """Single-input forward: returns (probabilities, ForwardTrace)."""
    result = forward_batch(model, tensor.bits[None], use_quantized=use_quantized)
    counts = {name: int(v[0]) for name, v in result.spike_counts.items()}
    trace = ForwardTrace(
        accumulator=result.accumulator[0],
        spike_counts=counts,
        per_step_spikes=result.per_step_spikes if per_step else None,
    )
    return result.probs[0], trace


# ---------------------------------------------------------------------------
# model file format


_MODEL_FORMAT = "spikeradar-model"
_AXES = {
    "conv": ["out_channel", "in_channel", "kernel_h", "kernel_w"],
    "fc1": ["out", "in"],
    "fc2": ["out", "in"],
}


def save_model(model: SnnModel, path) -> None:
    """Write a model file: JSON manifest line, then one container-format
    record per weight tensor (float64), then quantized code records (int8)
    when a quantized view is present."""
    manifest = {
        "format": _MODEL_FORMAT,
        "version": 1,
        "t_inf": model.t_inf,
        "input_shape": list(model.input_shape),
        "n_classes": model.n_classes,
        "hidden": model.hidden,
        "conv_channels": model.conv_channels,
        "kernel": list(model.kernel),
        "fire_mode": model.fire_mode,
        "layers": [spec.to_dict() for spec in model.layers],
        "tensors": list(WEIGHT_NAMES),
        "quantization": None,
        "provenance": model.provenance,
    }
    if model.quantized:
        manifest["quantization"] = {
            "bits": model.quantized_bits,
            "scales": {n: model.quantized[n].scale for n in WEIGHT_NAMES},
        }
    with open(path, "wb") as f:
        f.write(json.dumps(manifest, sort_keys=True).encode("utf-8"))
        f.write(b"\n")
        for name in WEIGHT_NAMES:
            write_tensor_to(f, model.weights[name], _AXES[name], dtype="f64")
        if model.quantized:
            for name in WEIGHT_NAMES:
                write_tensor_to(f, model.quantized[name].codes, _AXES[name], dtype="i8")


def load_model(path) -> SnnModel:
    """Read a model file written by save_model."""
    with open(path, "rb") as f:
        line = f.readline(1 << 20)
        if not line.endswith(b"\n"):
            raise InvalidInput(f"{path}: model manifest line missing")
        try:
            manifest = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise InvalidInput(f"{path}: model manifest is not valid JSON") from exc
        if manifest.get("format") != _MODEL_FORMAT:
            raise InvalidInput(f"{path}: not a model file")
        weights = {}
        for name in manifest["tensors"]:
            values, header = read_tensor_from(f)
            if header["dtype"] != "f64":
                raise InvalidInput(f"{path}: weight {name!r} is not f64")
            weights[name] = values
        quantized = None
        qmeta = manifest.get("quantization")
        if qmeta:
            quantized = {}
            for name in manifest["tensors"]:
                codes, header = read_tensor_from(f)
                if header["dtype"] != "i8":
                    raise InvalidInput(f"{path}: codes for {name!r} are not i8")
                quantized[name] = QuantizedTensor(
                    codes=codes, scale=qmeta["scales"][name], bits=qmeta["bits"]
                )
        if f.read(1):
            raise InvalidInput(f"{path}: trailing bytes after model payload")
    return SnnModel(
        layers=[LayerSpec.from_dict(d) for d in manifest["layers"]],
        weights=weights,
        t_inf=manifest["t_inf"],
        input_shape=tuple(manifest["input_shape"]),
        n_classes=manifest["n_classes"],
        hidden=manifest["hidden"],
        conv_channels=manifest["conv_channels"],
        kernel=tuple(manifest["kernel"]),
        fire_mode=manifest["fire_mode"],
        quantized=quantized,
        provenance=manifest.get("provenance"),
    )
