"""Exception hierarchy.

Validation problems (bad arguments, malformed files) derive from
:class:`ValidationError`; failures of the numerics derive from
:class:`NumericalError`. The CLI maps the two families to exit codes 1 and 2.
"""


class NftError(Exception):
    """Base class for all errors raised by nftkit."""


class ValidationError(NftError, ValueError):
    pass


class InvalidArgumentError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(NftError, ArithmeticError):
    pass


class ScatteringOverflowError(NumericalError):
    def __init__(self, lam):
        super().__init__(f"non-finite scattering data at lambda={complex(lam)!r}")
        self.lam = lam


class DegenerateSpectrumError(NumericalError):
    """a(lambda) vanishes on the real axis."""


class RiccatiSingularityError(NumericalError):
    pass


class DomainError(NumericalError):
    pass


class MultiplicityError(NumericalError):
    """A root of a(lambda) looks like a multiple zero."""


class NumericalBlowupError(NumericalError):
    def __init__(self, step):
        super().__init__(f"non-finite field after split step {step}")
        self.step = step


class IllConditionedContourError(NumericalError):
    pass


class RhSingularError(NumericalError):
    pass


class InftError(NumericalError):
    """One or more time samples of the inverse transform failed."""

    def __init__(self, failures):
        self.failures = list(failures)
        shown = ", ".join(f"t={t:.6g}: {err}" for t, err in self.failures[:5])
        more = "" if len(self.failures) <= 5 else f" (+{len(self.failures) - 5} more)"
        super().__init__(f"{len(self.failures)} sample(s) failed: {shown}{more}")


class ConsistencyError(NumericalError):
    pass
