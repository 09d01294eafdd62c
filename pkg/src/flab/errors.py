"""Exception hierarchy for the flab library."""


class FlabError(Exception):
    """Base class for all library errors."""


class ParseError(FlabError):
    """Syntax error in a presentation file; carries line/column."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + loc)


class UnknownGenerator(FlabError):
    pass


class BadCount(FlabError):
    pass


class BadSubstitution(FlabError):
    pass


class RingMismatch(FlabError):
    pass


class ZeroPolynomial(FlabError):
    pass


class ZeroIdeal(FlabError):
    pass


class Unsupported(FlabError):
    pass


class BadBasis(FlabError):
    pass


class NoCharacters(FlabError):
    pass


class NotACharacter(FlabError):
    pass


class BadRelator(FlabError):
    pass


class NotRank2(FlabError):
    pass


class NoFreePart(FlabError):
    pass


class NotSimpleForm(FlabError):
    pass


class NotStandardForm(FlabError):
    pass


class Overflow(FlabError):
    """Coset enumeration exceeded its bound; index may be infinite."""


class Incomplete(FlabError):
    pass


class NotPrimitive(FlabError):
    pass


class NoPattern(FlabError):
    pass


class BadSlope(FlabError):
    pass


class NoCusp(FlabError):
    pass


class NoInclusion(FlabError):
    pass
