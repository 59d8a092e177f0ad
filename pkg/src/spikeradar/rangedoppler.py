"""Temporal subsampling and binarization of range-Doppler map sequences.

Input sequences are CFAR-processed magnitude maps of variable length T_fr;
the output is a fixed-length binary sequence suitable for direct use as a
spike train.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput


@dataclass(frozen=True)
class RangeDopplerSequence:
    """Sequence of nonnegative range-Doppler magnitude frames RD[t, l, m]."""

    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        object.__setattr__(self, "frames", frames)
        if frames.ndim != 3 or frames.shape[0] < 1:
            raise InvalidInput(
                "range-Doppler sequence must be 3-D (frame x range x Doppler) "
                "with at least one frame"
            )
        if not np.isfinite(frames).all():
            raise InvalidInput("range-Doppler sequence contains non-finite values")
        if frames.size and frames.min() < 0:
            raise InvalidInput("range-Doppler magnitudes must be >= 0")

    @property
    def t_fr(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class BinaryRdSequence:
    """Binary range-Doppler sequence RD_b[n, l, m], entries in {0, 1}."""

    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames)
        if frames.ndim != 3 or frames.shape[0] < 1:
            raise InvalidInput("binary sequence must be 3-D with >= 1 frame")
        if not np.isin(frames, (0, 1)).all():
            raise InvalidInput("binary sequence entries must be 0 or 1")
        object.__setattr__(self, "frames", frames.astype(np.uint8))

    @property
    def t_inf(self) -> int:
        return self.frames.shape[0]


def bin_boundaries(t_fr: int, t_inf: int) -> np.ndarray:
    """Frame-bin boundaries: edge b = floor(b * t_fr / t_inf), b = 0..t_inf.

    Bin b covers frames [edge[b], edge[b+1]). The bins are disjoint, cover
    [0, t_fr) exactly once, and every bin is non-empty when t_inf <= t_fr.
    """
    b = np.arange(t_inf + 1, dtype=np.int64)
    return (b * t_fr) // t_inf


def temporal_subsample(seq: RangeDopplerSequence, t_inf: int) -> RangeDopplerSequence:
    """Average the T_fr frames down to t_inf contiguous bins.

    Each output frame is the mean of its bin's frames; when t_fr is an
    integer multiple of t_inf this is exactly the (t_inf / t_fr)-scaled
    block sum. Non-integer ratios use floor boundaries (see bin_boundaries)
    with each bin averaged by its own size.
    """
    if t_inf < 1:
        raise InvalidInput("t_inf must be >= 1")
    if t_inf > seq.t_fr:
        raise InvalidInput(
            f"t_inf {t_inf} exceeds sequence length t_fr {seq.t_fr}"
        )
    edges = bin_boundaries(seq.t_fr, t_inf)
    out = np.empty((t_inf,) + seq.frames.shape[1:], dtype=np.float64)
    for b in range(t_inf):
        out[b] = seq.frames[edges[b] : edges[b + 1]].mean(axis=0)
    return RangeDopplerSequence(frames=out)


def binarize(seq: RangeDopplerSequence) -> BinaryRdSequence:
    """Threshold strictly against zero: bit = 1 iff value > 0."""
    return BinaryRdSequence(frames=(seq.frames > 0).astype(np.uint8))
