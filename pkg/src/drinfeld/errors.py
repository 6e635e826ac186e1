"""Exception hierarchy.

Every failure that a caller can remediate carries a machine-readable hint
(`hint` attribute) saying what to enlarge; the CLI serializes these.
"""


class DrinfeldError(Exception):
    """Base class; `hint` is a short remediation string or None."""

    hint = None

    def payload(self):
        d = {"error": type(self).__name__, "message": str(self)}
        if self.hint:
            d["hint"] = self.hint
        return d


class ZeroInversionError(DrinfeldError, ZeroDivisionError):
    pass


class PrecisionExhaustedError(DrinfeldError):
    pass


class RamificationNeeded(DrinfeldError):
    """An exponent does not live on the current 1/e lattice."""

    def __init__(self, e_needed, msg=None):
        self.e_needed = e_needed
        self.hint = "refit ramification index e to %d" % e_needed
        super().__init__(msg or "exponent requires ramification index %d" % e_needed)


class ExtensionNeeded(DrinfeldError):
    """A root is missing from F_{q^M}; M_needed is sufficient (and minimal found)."""

    def __init__(self, M_needed, msg=None):
        self.M_needed = M_needed
        self.hint = "increase M to %d" % M_needed
        super().__init__(msg or "no root in the working extension; need M >= %d" % M_needed)


class NonUnitSeriesError(DrinfeldError):
    """unit_inv precondition failed; `index` is the offending t-coefficient."""

    def __init__(self, index, msg=None):
        self.index = index
        super().__init__(msg or "series is not a unit: coefficient %d violates the norm condition" % index)


class DecayCertificationError(DrinfeldError):
    hint = "increase t_trunc"


class RadiusError(DrinfeldError):
    """Argument on or outside the open disk of convergence."""


class ContractionError(DrinfeldError):
    """The product seed matrix failed the strict-contraction bound."""


class BudgetExceededError(DrinfeldError):
    pass


class StrictnessError(DrinfeldError):
    """Torsion basis failed its degree/Moore-determinant certificate."""

    hint = "rerun at higher precision (or report a bug if it persists)"


class SpecParseError(DrinfeldError):
    def __init__(self, msg, pos=None):
        self.pos = pos
        super().__init__(msg if pos is None else "%s (at position %d)" % (msg, pos))
