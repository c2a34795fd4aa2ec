"""Exception hierarchy shared by the library and the CLI.

Every error carries a stable kebab-case ``code`` that the CLI prints in its
summary line.
"""


class Prony2DError(Exception):
    code = "prony2d-error"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.details = details


class InvalidParameterError(Prony2DError):
    code = "invalid-parameter"


class SchemaError(Prony2DError):
    code = "schema"


# Recovery


class RecoveryError(Prony2DError):
    code = "recovery-error"


class ModelOrderExceededError(RecoveryError):
    code = "model-order-exceeded"


class OffCircleRootError(RecoveryError):
    code = "off-circle-root"


class ConditioningError(RecoveryError):
    code = "conditioning"


class ModelBoundViolationError(RecoveryError):
    code = "model-bound-violation"


class DegreeBoundViolatedError(RecoveryError):
    code = "degree-bound-violated"


class InconsistentRowsError(RecoveryError):
    code = "inconsistent-rows"


class MultiplicityMismatchError(RecoveryError):
    code = "multiplicity-mismatch"


class MissingSamplePointsError(RecoveryError):
    code = "missing-sample-points"

    def __init__(self, missing: list[tuple[int, int]], message: str = ""):
        shown = ", ".join(str(p) for p in missing[:5])
        more = f" (+{len(missing) - 5} more)" if len(missing) > 5 else ""
        super().__init__(message or f"missing {len(missing)} sample point(s): {shown}{more}")
        self.missing = missing


class RecoveryInconclusiveError(RecoveryError):
    code = "recovery-inconclusive"


class CandidateBudgetExceededError(RecoveryInconclusiveError):
    pass


class AmbiguousDataError(RecoveryError):
    code = "ambiguous-data"

    def __init__(self, message: str = "", candidates: list | None = None):
        super().__init__(message)
        self.candidates = candidates or []


# Geometry


class GeometryError(Prony2DError):
    code = "geometry-error"


class PolygonValidationError(GeometryError):
    code = "validation"

    def __init__(self, violations: list, message: str = ""):
        summary = "; ".join(str(v) for v in violations)
        super().__init__(message or f"invalid polygon: {summary}")
        self.violations = violations


class SingularDirectionError(GeometryError):
    code = "singular-direction"


class ParityError(GeometryError):
    code = "parity"


class ReconnectionError(GeometryError):
    code = "reconnection"


class CoefficientStructureError(GeometryError):
    code = "coefficient-structure"


class VerificationError(GeometryError):
    code = "verification"


class EmptyRegionError(GeometryError):
    code = "empty-region"
