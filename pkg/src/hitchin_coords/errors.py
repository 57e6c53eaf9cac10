"""Structured error types.

Every error carries an ``exit_code`` used by the command line front end:
1 for malformed input, 2 for a failed mathematical precondition,
3 for an inconsistent reconstruction and 4 for a violated identity.
"""


class HitchinError(Exception):
    exit_code = 2

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_json(self):
        out = {"error": type(self).__name__, "message": str(self)}
        if self.details:
            out["details"] = {k: str(v) for k, v in sorted(self.details.items())}
        return out


class InputError(HitchinError):
    """Malformed or inconsistent input data."""

    exit_code = 1


class LaminationInvalid(InputError):
    def __init__(self, violations):
        super().__init__("lamination failed validation: " + "; ".join(violations))
        self.violations = list(violations)


class UnknownGenerator(InputError):
    pass


class UnknownLeaf(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonRealSpectrum(HitchinError):
    pass


class RepeatedModulus(HitchinError):
    pass


class NotLoxodromic(HitchinError):
    pass


class MixedSigns(HitchinError):
    pass


class NotGeneric(HitchinError):
    pass


class NotPositive(HitchinError):
    pass


class DeterminantNotOne(HitchinError):
    pass


class NotHitchinCompatible(HitchinError):
    pass


class MembershipFailed(HitchinError):
    pass


class EigenvalueMismatch(HitchinError):
    pass


class SamplingFailed(HitchinError):
    pass


class RealizationFailed(HitchinError):
    exit_code = 3


class RelatorViolation(HitchinError):
    exit_code = 3


class IdentityViolation(HitchinError):
    exit_code = 4
