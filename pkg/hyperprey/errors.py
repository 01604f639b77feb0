class InvalidParameterError(ValueError):
    pass


class MeshTooCoarseError(InvalidParameterError):
    pass


class SnapshotFormatError(ValueError):
    pass


class StepRejectedError(RuntimeError):
    pass


class DivergedError(RuntimeError):
    pass


class AuditFailure(RuntimeError):
    pass
