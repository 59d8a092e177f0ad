"""Spiking network engine vs scalar state-machine references."""

import os

import numpy as np
import pytest

from scalar_reference import dyadic_weights, random_tiny_model, scalar_forward
from spikeradar.encoding import SpikeTensor
from spikeradar.errors import InvalidInput, MissingQuantizedWeights
from spikeradar.quant import quantize
from spikeradar.snn import (
    IfState,
    SnnModel,
    build_layers,
    forward,
    forward_batch,
    if_step,
    init_model,
    load_model,
    maxpool_spikes,
    relaxed_spike,
    save_model,
    softmax,
)


def tiny_model(weights, meta, t_inf, shape, n_classes, hidden,
               fire_mode="compare_then_integrate"):
    return SnnModel(
        layers=build_layers(shape, n_classes, meta["c1"], meta["kernel"], hidden),
        weights=weights,
        t_inf=t_inf,
        input_shape=shape,
        n_classes=n_classes,
        hidden=hidden,
        conv_channels=meta["c1"],
        kernel=meta["kernel"],
        fire_mode=fire_mode,
    )


# ── single-neuron dynamics ──────────────────────────────────────────────────


def test_if_step_branch_semantics():
    # sub-threshold accumulation
    state = IfState(v=np.array([0.5]))
    state, s = if_step(state, np.array([0.3]))
    assert s[0] == 0 and state.v[0] == pytest.approx(0.8)
    # above threshold: spike, reset, and the incoming drive is discarded
    state = IfState(v=np.array([1.2]))
    state, s = if_step(state, np.array([99.0]))
    assert s[0] == 1 and state.v[0] == 0.0
    # negative drive clamps at zero
    state = IfState(v=np.array([0.1]))
    state, s = if_step(state, np.array([-5.0]))
    assert s[0] == 0 and state.v[0] == 0.0


def test_if_constant_drive_trace():
    # J = 0.4 from rest: potential walks 0.4, 0.8, 1.2, then the spike is
    # emitted on the NEXT step (decision reads the pre-update potential)
    state = IfState(v=np.zeros(1))
    trace = []
    spikes = []
    for _ in range(6):
        state, s = if_step(state, np.array([0.4]))
        trace.append(round(float(state.v[0]), 10))
        spikes.append(int(s[0]))
    assert spikes == [0, 0, 0, 1, 0, 0]
    assert trace == [0.4, 0.8, 1.2, 0.0, 0.4, 0.8]


def test_if_step_integrate_then_fire_variant():
    state = IfState(v=np.array([0.7]))
    state, s = if_step(state, np.array([0.4]), fire_mode="integrate_then_fire")
    # 0.7 + 0.4 crosses threshold within the same step here
    assert s[0] == 1 and state.v[0] == 0.0


def test_if_step_shape_mismatch():
    with pytest.raises(InvalidInput):
        if_step(IfState(v=np.zeros(3)), np.zeros(4))


def test_relaxed_spike_anchors():
    # smooth stand-in: 1/4 at threshold, -> 0 far below, -> 1/2 far above
    assert relaxed_spike(np.array([1.0]))[0] == pytest.approx(0.25)
    assert relaxed_spike(np.array([-10.0]))[0] == pytest.approx(0.0, abs=1e-12)
    assert relaxed_spike(np.array([12.0]))[0] == pytest.approx(0.5, abs=1e-12)


# ── pooling ─────────────────────────────────────────────────────────────────


def test_maxpool_or_and_window_membership():
    bits = np.zeros((1, 1, 4, 4), dtype=np.uint8)
    out = maxpool_spikes(bits)
    assert out.shape == (1, 1, 2, 2)
    assert out.sum() == 0

    bits[0, 0, 0, 1] = 1
    out = maxpool_spikes(bits)
    assert out[0, 0, 0, 0] == 1
    assert out.sum() == 1

    ones = np.ones((1, 1, 4, 4), dtype=np.uint8)
    assert np.all(maxpool_spikes(ones) == 1)


def test_maxpool_matches_bruteforce_windows():
    rng = np.random.default_rng(60)
    for _ in range(15):
        bits = (rng.random((2, 3, 6, 6)) < 0.3).astype(np.uint8)
        out = maxpool_spikes(bits)
        for b in range(2):
            for c in range(3):
                for y in range(3):
                    for x in range(3):
                        window = bits[b, c, 2 * y:2 * y + 2, 2 * x:2 * x + 2]
                        assert out[b, c, y, x] == window.max()


def test_maxpool_truncates_odd_edges():
    bits = np.ones((1, 1, 5, 7), dtype=np.uint8)
    out = maxpool_spikes(bits)
    assert out.shape == (1, 1, 2, 3)


# ── forward equivalence ─────────────────────────────────────────────────────


def test_forward_bit_exact_vs_scalar_reference():
    """Dyadic-grid weights make every sum exact, so the vectorized pass
    and the scalar loop must agree to the last bit on 50 random models."""
    rng = np.random.default_rng(61)
    for trial in range(50):
        t_inf = int(rng.integers(2, 6))
        n_classes = int(rng.integers(2, 5))
        hidden = int(rng.integers(4, 10))
        shape = (int(rng.integers(1, 3)), 8, 8)
        weights, bits, meta = random_tiny_model(
            rng, t_inf=t_inf, shape=shape, n_classes=n_classes,
            hidden=hidden, dyadic=True,
        )
        model = tiny_model(weights, meta, t_inf, shape, n_classes, hidden)
        probs, trace = forward(model, SpikeTensor(bits=bits))
        acc_ref, probs_ref, counts_ref = scalar_forward(
            weights, bits, n_classes, hidden
        )
        assert np.array_equal(trace.accumulator, acc_ref), f"trial {trial}"
        assert np.array_equal(probs, probs_ref), f"trial {trial}"
        for name in ("sigma1", "sigma2", "sigma3"):
            assert trace.spike_counts[name] == counts_ref[name], (trial, name)


def test_forward_close_vs_scalar_reference_continuous():
    # same check with generic floats; summation order may differ, so ask
    # for 1e-12 closeness instead of equality
    rng = np.random.default_rng(62)
    for trial in range(10):
        weights, bits, meta = random_tiny_model(rng, t_inf=4, dyadic=False)
        model = tiny_model(weights, meta, 4, (1, 8, 8), 3, 7)
        probs, trace = forward(model, SpikeTensor(bits=bits))
        acc_ref, probs_ref, _ = scalar_forward(weights, bits, 3, 7)
        assert np.abs(trace.accumulator - acc_ref).max() == 0.0
        assert np.abs(probs - probs_ref).max() < 1e-12


def test_forward_integrate_then_fire_vs_scalar():
    rng = np.random.default_rng(63)
    for _ in range(10):
        weights, bits, meta = random_tiny_model(rng, t_inf=3, dyadic=True)
        model = tiny_model(weights, meta, 3, (1, 8, 8), 3, 7,
                           fire_mode="integrate_then_fire")
        probs, trace = forward(model, SpikeTensor(bits=bits))
        acc_ref, probs_ref, _ = scalar_forward(
            weights, bits, 3, 7, fire_mode="integrate_then_fire"
        )
        assert np.array_equal(trace.accumulator, acc_ref)
        assert np.array_equal(probs, probs_ref)


def test_zero_input_propagates_zero():
    m = init_model(input_shape=(1, 10, 10), n_classes=4, t_inf=4, seed=5)
    bits = np.zeros((4, 1, 10, 10), dtype=np.uint8)
    probs, trace = forward(m, SpikeTensor(bits=bits))
    assert trace.total_spikes == 0
    assert np.all(trace.accumulator == 0)
    assert np.allclose(probs, 0.25)


def test_accumulator_bounded_by_t_inf():
    rng = np.random.default_rng(64)
    for _ in range(10):
        weights, bits, meta = random_tiny_model(rng, t_inf=5, scale=1.5)
        model = tiny_model(weights, meta, 5, (1, 8, 8), 3, 7)
        _, trace = forward(model, SpikeTensor(bits=bits))
        assert trace.accumulator.max() <= 5


def test_batch_composition_invariance():
    """An example's output may not depend on what else is in the batch."""
    rng = np.random.default_rng(65)
    m = init_model(input_shape=(1, 12, 12), n_classes=3, t_inf=4, seed=9)
    batch = (rng.random((16, 4, 1, 12, 12)) < 0.4).astype(np.uint8)
    full = forward_batch(m, batch)
    for i in (0, 5, 15):
        alone = forward_batch(m, batch[i:i + 1])
        assert np.array_equal(alone.probs[0], full.probs[i]), f"example {i}"
        assert np.array_equal(alone.accumulator[0], full.accumulator[i])
    # different company, same result
    pair = forward_batch(m, batch[[5, 15]])
    assert np.array_equal(pair.probs[0], full.probs[5])
    assert np.array_equal(pair.probs[1], full.probs[15])


def test_forward_shape_validation():
    m = init_model(input_shape=(1, 10, 10), n_classes=3, t_inf=4, seed=1)
    with pytest.raises(InvalidInput):
        forward(m, SpikeTensor(bits=np.zeros((3, 1, 10, 10), dtype=np.uint8)))
    with pytest.raises(InvalidInput):
        forward(m, SpikeTensor(bits=np.zeros((4, 1, 9, 10), dtype=np.uint8)))


def test_quantized_forward_identity_on_representable_weights():
    # weights already on the quantizer grid: the dequantized view is
    # bit-identical, so both passes must agree exactly
    rng = np.random.default_rng(66)
    m = init_model(input_shape=(1, 10, 10), n_classes=3, t_inf=4, seed=2)
    for name, w in m.weights.items():
        limit = 2 ** (4 - 1) - 1
        codes = rng.integers(-limit, limit + 1, size=w.shape)
        m.weights[name] = codes.astype(np.float64) * 0.125
    m.quantized = {k: quantize(v, bits=4) for k, v in m.weights.items()}
    for name in m.weights:
        assert np.array_equal(
            m.weights[name],
            m.quantized[name].codes.astype(np.float64) * m.quantized[name].scale,
        )
    bits = (rng.random((6, 4, 1, 10, 10)) < 0.3).astype(np.uint8)
    full = forward_batch(m, bits, use_quantized=False)
    quant = forward_batch(m, bits, use_quantized=True)
    assert np.array_equal(full.probs, quant.probs)


def test_quantized_forward_requires_quantized_weights():
    m = init_model(input_shape=(1, 10, 10), n_classes=3, t_inf=4, seed=3)
    bits = np.zeros((1, 4, 1, 10, 10), dtype=np.uint8)
    with pytest.raises(MissingQuantizedWeights):
        forward_batch(m, bits, use_quantized=True)


# ── softmax ─────────────────────────────────────────────────────────────────


def test_softmax_rows_and_stability():
    x = np.array([[0.0, 0.0], [1000.0, 1000.0], [-3.0, 5.0]])
    p = softmax(x)
    assert np.allclose(p.sum(axis=1), 1.0)
    assert np.allclose(p[0], 0.5)
    assert np.allclose(p[1], 0.5)
    assert p[2, 1] > p[2, 0]
    assert np.isfinite(p).all()


# ── init and persistence ────────────────────────────────────────────────────


def test_init_model_shapes_and_determinism():
    m = init_model(input_shape=(1, 48, 100), n_classes=5, t_inf=4, seed=0)
    assert m.weights["conv"].shape == (12, 1, 5, 5)
    assert m.weights["fc1"].shape == (128, 12 * 22 * 48)
    assert m.weights["fc2"].shape == (5, 128)
    m2 = init_model(input_shape=(1, 48, 100), n_classes=5, t_inf=4, seed=0)
    for k in m.weights:
        assert np.array_equal(m.weights[k], m2.weights[k])
    m3 = init_model(input_shape=(1, 48, 100), n_classes=5, t_inf=4, seed=1)
    assert not np.array_equal(m.weights["conv"], m3.weights["conv"])


def test_glorot_bounds():
    m = init_model(input_shape=(1, 20, 20), n_classes=4, t_inf=4, seed=7)
    flat = m.flat_features()
    limits = {
        "conv": np.sqrt(6.0 / (1 * 25 + 12 * 25)),
        "fc1": np.sqrt(6.0 / (flat + 128)),
        "fc2": np.sqrt(6.0 / (128 + 4)),
    }
    for name, w in m.weights.items():
        assert np.abs(w).max() <= limits[name], name
        # a uniform draw this large should come close to its limit
        assert np.abs(w).max() > 0.8 * limits[name], name


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(67)
    m = init_model(input_shape=(1, 12, 12), n_classes=3, t_inf=4, seed=4)
    m.quantized = {k: quantize(v, bits=4) for k, v in m.weights.items()}
    m.provenance = {"trained_on": "unit-test", "fold": 2}
    path = os.path.join(tmp_path, "model.bin")
    save_model(m, path)
    back = load_model(path)
    assert back.t_inf == m.t_inf
    assert back.n_classes == m.n_classes
    assert back.input_shape == m.input_shape
    assert back.fire_mode == m.fire_mode
    assert back.provenance == m.provenance
    for k in m.weights:
        assert np.array_equal(back.weights[k], m.weights[k]), k
        assert np.array_equal(back.quantized[k].codes, m.quantized[k].codes)
        assert back.quantized[k].scale == m.quantized[k].scale
        assert back.quantized[k].bits == 4

    bits = (rng.random((4, 1, 12, 12)) < 0.4).astype(np.uint8)
    p1, _ = forward(m, SpikeTensor(bits=bits), use_quantized=True)
    p2, _ = forward(back, SpikeTensor(bits=bits), use_quantized=True)
    assert np.array_equal(p1, p2)


def test_save_load_without_quantized(tmp_path):
    m = init_model(input_shape=(1, 8, 8), n_classes=2, t_inf=2, seed=5)
    path = os.path.join(tmp_path, "fp.bin")
    save_model(m, path)
    back = load_model(path)
    assert back.quantized is None
    for k in m.weights:
        assert np.array_equal(back.weights[k], m.weights[k])


def test_load_rejects_garbage(tmp_path):
    path = os.path.join(tmp_path, "junk.bin")
    with open(path, "wb") as f:
        f.write(b"not a model\n\x00\x01")
    with pytest.raises(InvalidInput):
        load_model(path)
