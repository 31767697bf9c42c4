"""Exception hierarchy shared by all kp5 modules."""


class Kp5Error(Exception):
    """Base class for every error raised by kp5."""


class DomainError(Kp5Error, ValueError):
    """A symbol or lemma was evaluated outside its domain (e.g. m = 0)."""


class IntegrityError(Kp5Error):
    """A field violates a structural invariant (reality symmetry, finiteness)."""


class ConstraintError(Kp5Error, ValueError):
    """Initial data violates the zero x-mean constraint on nonzero n."""


class PreconditionError(Kp5Error, ValueError):
    """A regime guard or lemma hypothesis does not hold."""


class UsageError(Kp5Error, ValueError):
    """Incompatible arguments, e.g. mismatched lattice windows."""


class BlowUpError(Kp5Error):
    """Raised when a coefficient becomes non-finite or exceeds the threshold.

    Carries the time of detection, the offending magnitude and, when raised
    from ``integrate``, the records produced so far.
    """

    def __init__(self, t, max_coeff, records=None):
        self.t = t
        self.max_coeff = max_coeff
        self.records = list(records) if records is not None else []
        super().__init__(f"blow-up at t={t:.6g}: max |coeff| = {max_coeff:.6g}")
