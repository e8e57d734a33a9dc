"""Exception types raised by the decoders and the simulation harness."""


class InputShapeError(ValueError):
    """An input vector does not have the length the code requires."""


class CodeParameterError(ValueError):
    """Invalid polar code parameters (N, K, information set, error probabilities)."""


class DecoderStateError(RuntimeError):
    """A trellis or decoder was driven out of order."""


class ConfigError(ValueError):
    """Invalid simulation configuration."""
