"""Exception types.  Every domain error carries a short machine-readable ``code``."""

from __future__ import annotations


class MarkovSympError(Exception):
    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details

    def to_json(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        return out


def _jsonable(v):
    if isinstance(v, (str, int, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return str(v)


class AllChartsSingular(MarkovSympError):
    code = "all_charts_singular"


class SurfaceDrift(MarkovSympError):
    code = "surface_drift"


class DegenerateFrame(MarkovSympError):
    code = "degenerate_frame"


class IdentityMismatch(MarkovSympError):
    code = "identity_mismatch"


class ResultantDegenerate(MarkovSympError):
    code = "resultant_degenerate"


class NotSingular(MarkovSympError):
    code = "not_singular"


class JetDegenerate(MarkovSympError):
    code = "jet_degenerate"


class NotTangential(MarkovSympError):
    code = "not_tangential"


class DecompositionFailure(MarkovSympError):
    code = "decomposition_failure"


class NotMarkovNumber(MarkovSympError):
    code = "not_markov_number"


class ExcludedZ(MarkovSympError):
    code = "excluded_z"


class NoSolution(MarkovSympError):
    code = "no_solution"


class RetryExhausted(MarkovSympError):
    code = "retry_exhausted"


class RootSelectionFailure(MarkovSympError):
    code = "root_selection_failure"


class VerificationFailure(MarkovSympError):
    code = "verification_failure"


class InvalidInput(MarkovSympError):
    code = "invalid_input"
