"""Exception hierarchy shared across the package."""


class STSError(Exception):
    """Base class for every error raised by stsembed."""


class BadBlock(STSError):
    pass


class DuplicatePair(STSError):
    def __init__(self, pair, blocks=()):
        self.pair = tuple(pair)
        self.blocks = tuple(blocks)
        super().__init__(f"pair {self.pair} occurs in more than one block {self.blocks}")


class Incomplete(STSError):
    pass


class NotBijective(STSError):
    pass


class EvenModulus(STSError):
    pass


class BadParity(STSError):
    pass


class BadRange(STSError):
    pass


class NotEmbedded(STSError):
    pass


class TrivialForbidden(STSError):
    pass


class OrderTooSmall(STSError):
    pass


class BadCycle(STSError):
    pass


class NoSafeChoice(STSError):
    """No admissible image survived the coset-safety filters.

    The counting argument behind the bijection builder says this cannot
    happen, so seeing it means a bug.
    """


class OutOfRange(STSError):
    pass


class InternalInconsistency(STSError):
    pass


class BadDegrees(STSError):
    pass


class BadEdgeCount(STSError):
    pass


class DecompositionNotFound(STSError):
    pass


class StepFailed(STSError):
    pass


class OverlapNotSubsystem(STSError):
    pass


class WitnessInvalid(STSError):
    pass


class WitnessNotFound(STSError):
    pass


class BadDimension(STSError):
    pass


class BadCongruence(STSError):
    pass


class SearchExhausted(STSError):
    pass


class FormatError(STSError):
    pass
