"""Exception types shared across the library."""


class CloneLabError(Exception):
    """Base class for all library errors."""


# graded sets
class NotAnEquivalence(CloneLabError):
    pass


class SourceTargetMismatch(CloneLabError):
    pass


# term syntax
class IndexOutOfContext(CloneLabError):
    pass


class UnknownSymbol(CloneLabError):
    pass


class ArityMismatch(CloneLabError):
    pass


class MixedContexts(CloneLabError):
    pass


class TermSyntaxError(CloneLabError):
    """Malformed concrete term syntax (named to avoid shadowing the builtin)."""


# algebra semantics
class SignatureMismatch(CloneLabError):
    pass


class NotATotalMap(CloneLabError):
    pass


class EmptyCarrierWithNullary(CloneLabError):
    pass


# equational logic
class InvalidAxiom(CloneLabError):
    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = tuple(path)


class RuleMismatch(CloneLabError):
    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = tuple(path)


class ContextMismatch(CloneLabError):
    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = tuple(path)


class IncompleteFreeModel(CloneLabError):
    pass


class UniverseEscape(CloneLabError):
    pass


# clones
class ArityCapExceeded(CloneLabError):
    pass


class BudgetExceeded(CloneLabError):
    pass


class HypothesisViolated(CloneLabError):
    def __init__(self, message, axiom_index):
        super().__init__(message)
        self.axiom_index = axiom_index


class NotAModel(CloneLabError):
    pass


# file formats / cli
class FormatError(CloneLabError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
