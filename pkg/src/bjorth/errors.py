"""Exception hierarchy shared by every module of the package."""


class BJOError(Exception):
    """Base class for all package errors."""


class AlgebraMismatch(BJOError):
    """Operands live over different algebras."""


class SpaceMismatch(BJOError):
    """Module elements live in different module spaces."""


class ShapeError(BJOError, ValueError):
    """Block shapes do not match the declared dimensions."""


class NotSelfAdjoint(BJOError):
    pass


class NotPositive(BJOError):
    pass


class EmptyInput(BJOError, ValueError):
    pass


class CommutativeAlgebra(BJOError):
    """No block of dimension >= 2, so strong and quasi-strong coincide."""


class NotEnoughBlocks(BJOError):
    """The algebra is prime (one block); disjoint supports do not exist."""


class NotDisjoint(BJOError):
    pass


class DegenerateSample(BJOError):
    pass


class ConfigError(BJOError, ValueError):
    pass


class ParseError(BJOError, ValueError):
    """Malformed problem file; ``path`` locates the offending entry."""

    def __init__(self, msg, path=""):
        super().__init__(f"{path}: {msg}" if path else msg)
        self.path = path


class ToleranceError(ConfigError):
    """A tolerance record is unusable (nonpositive or nonfinite)."""
