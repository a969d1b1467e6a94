"""Exception types raised across the package."""


class RegrichError(Exception):
    """Base class for all package errors."""


class DimensionError(RegrichError):
    pass


class SingularMatrixError(RegrichError):
    def __init__(self, msg="matrix is singular", point=None):
        super().__init__(msg)
        self.point = point


class ZeroVectorError(RegrichError):
    pass


class PartitionError(RegrichError):
    pass


class ExactnessError(RegrichError):
    pass


class OrderingError(RegrichError):
    pass


class ConstructionError(RegrichError):
    def __init__(self, msg, stage=None):
        super().__init__(msg if stage is None else f"[{stage}] {msg}")
        self.stage = stage


class UnsupportedClassError(RegrichError):
    pass


class FormatError(RegrichError):
    pass
