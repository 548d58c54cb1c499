"""Exception hierarchy shared by every module."""


class TietzeError(Exception):
    """Base class for library errors."""


class DomainError(TietzeError, ValueError):
    """A word or generator lies outside the expected alphabet."""


class ValidationError(TietzeError, ValueError):
    """A value violates a structural invariant (morphism law, square commuting, ...)."""


class UnsupportedRepresentation(TietzeError):
    """The operation needs extensional relations but got an intensional RelSet."""


class PreconditionError(TietzeError):
    pass


class CertificateError(TietzeError):
    """A certificate (derivation, witness, homomorphism) failed to replay."""


class FreshnessError(TietzeError):
    """A generator that should be new already occurs in the alphabet."""


class InvalidMonoidError(TietzeError, ValueError):
    pass


class ParseError(TietzeError):
    def __init__(self, message, file="<input>", line=0, column=0):
        self.file = file
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{file}:{line}:{column}: {message}")
