"""Exception hierarchy shared by every hodgeflow package.

Precondition failures subclass ValueError so callers that only know the
standard library still catch them.
"""


class HodgeFlowError(Exception):
    pass


class ConfigError(HodgeFlowError, ValueError):
    pass


# graph-core
class DuplicateEdgeError(HodgeFlowError, ValueError):
    pass


class SelfLoopError(HodgeFlowError, ValueError):
    pass


class NodeIdOutOfRangeError(HodgeFlowError, ValueError):
    pass


class DimensionMismatchError(HodgeFlowError, ValueError):
    pass


class DisconnectedGraphError(HodgeFlowError, ValueError):
    pass


class DimTooLargeError(HodgeFlowError, ValueError):
    pass


class NonConvergenceError(HodgeFlowError, RuntimeError):
    pass


class UnsupportedShiftError(HodgeFlowError, ValueError):
    pass


# autodiff
class ShapeMismatchError(HodgeFlowError, ValueError):
    pass


class CycleDetectedError(HodgeFlowError, RuntimeError):
    pass


# models
class EmptyMaskError(HodgeFlowError, ValueError):
    pass


class EmptyDatasetError(HodgeFlowError, ValueError):
    pass


class LabelOutOfRangeError(HodgeFlowError, ValueError):
    pass


class ShapeChainBrokenError(HodgeFlowError, ValueError):
    pass


# baselines / datagen / metrics
class EmptyObservationError(HodgeFlowError, ValueError):
    pass


class SingularKernelError(HodgeFlowError, RuntimeError):
    pass


class DisconnectedAfterRetriesError(HodgeFlowError, RuntimeError):
    pass


class EmptyEvalSetError(HodgeFlowError, ValueError):
    pass


class ZeroPeakError(HodgeFlowError, ValueError):
    pass


class LengthMismatchError(HodgeFlowError, ValueError):
    pass
