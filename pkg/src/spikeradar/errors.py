"""Exception types shared across the package.

The CLI maps these onto exit codes: InvalidInput and its subclasses exit 2,
CorruptDataset exits 3, anything else exits 1.
"""


class SpikeRadarError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(SpikeRadarError):
    """An argument, tensor, or file violates a documented contract."""


class CorruptDataset(SpikeRadarError):
    """A dataset directory is missing, inconsistent with its manifest, or unreadable."""


class StratificationError(InvalidInput):
    """A cross-validation split would leave some class absent from a training fold."""


class MissingQuantizedWeights(InvalidInput):
    """A quantized forward pass was requested on a model with no quantized view."""


class NonFiniteGradient(SpikeRadarError):
    """A NaN or infinity appeared in the gradients during training."""
