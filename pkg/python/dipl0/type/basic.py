from enum import Enum

__all__ = [
    'PrecisionType',
    'ExecutionModeType',
    'LayerKindType',
    'TaskPresetType',
    'SweepParamType',
    'get_enum',
]


class PrecisionType(Enum):
    """
    Precision Type

    Floating point width used by the network.

    Attributes
    ----------
    FLOAT64:
        Default. Gradient checks hold to a relative 1e-5.
    FLOAT32:
        Faster, gradient checks hold to about 1e-3.
    """
    FLOAT64 = 0
    FLOAT32 = 1

    @property
    def dtype(self):
        import numpy as np
        return np.float64 if self is PrecisionType.FLOAT64 else np.float32


class ExecutionModeType(Enum):
    """
    Execution Mode Type

    Selected with the ``DIPL0_MODE`` environment variable.

    Attributes
    ----------
    DETERMINISTIC:
        Everything runs in one process. Runs with equal seeds are bit-identical.
    PARALLEL:
        The sweep distributes its runs over worker processes. Each run is
        still deterministic on its own.
    """
    DETERMINISTIC = 0
    PARALLEL = 1


class LayerKindType(Enum):
    """
    Layer Kind Type

    Kind of a trainable layer, which fixes its parameter names.

    Attributes
    ----------
    CONV:
        ``weight`` and ``bias``.
    NORM:
        ``scale`` and ``shift``.
    """
    CONV = 0
    NORM = 1


class TaskPresetType(Enum):
    """
    Task Preset Type

    Tuned parameter sets of the ADMM solver.

    Attributes
    ----------
    SMOOTHING:
        Edge-preserving smoothing of textured images.
        :math:`\\lambda=0.025, \\beta=2.25, T=100, \\alpha=10^{-3}`
    JPEG:
        JPEG artifact removal in clip art.
        :math:`\\lambda=0.025, \\beta=2.0, T=100, \\alpha=10^{-3}`
    """
    SMOOTHING = 0
    JPEG = 1


class SweepParamType(Enum):
    """
    Sweep Param Type

    Parameter varied by one axis of the sensitivity sweep.
    """
    LAMBDA = 0
    BETA = 1
    T = 2


def get_enum(enum_cls, value):
    """
    Accept an enum member or its (case-insensitive) name.

    Parameters
    ----------
    enum_cls: type
        Enum class

    value: Enum or str

    Returns
    -------
    out: Enum
    """
    if isinstance(value, enum_cls):
        return value
    if isinstance(value, str):
        key = value.strip().upper()
        if key in enum_cls.__members__:
            return enum_cls[key]
    raise ValueError(f'{enum_cls.__name__}[{value}] not supported')
