"""Exception types, each carrying a stable machine-readable code."""


class RwtreeError(ValueError):
    """Base class for all validation and domain errors."""

    code = "ERROR"

    def __init__(self, message=""):
        super().__init__(f"{self.code}: {message}" if message else self.code)


class NonpositiveAtomError(RwtreeError):
    code = "NONPOSITIVE_ATOM"


class ProbSumError(RwtreeError):
    code = "PROB_SUM"


class BadProbabilityError(RwtreeError):
    code = "BAD_PROBABILITY"


class BadBranchingError(RwtreeError):
    code = "BAD_BRANCHING"


class DegenerateAtomsError(RwtreeError):
    code = "DEGENERATE_ATOMS"


class NegativeTError(RwtreeError):
    code = "NEGATIVE_T"


class NonpositiveRError(RwtreeError):
    code = "NONPOSITIVE_R"


class KappaOutOfRangeError(RwtreeError):
    code = "KAPPA_OUT_OF_RANGE"


class TreeTooLargeError(RwtreeError):
    code = "TREE_TOO_LARGE"


class DepthTooLargeError(RwtreeError):
    code = "DEPTH_TOO_LARGE"


class BadThetaError(RwtreeError):
    code = "BAD_THETA"


class KTooLargeError(RwtreeError):
    code = "K_TOO_LARGE"


class DegenerateTailError(RwtreeError):
    code = "DEGENERATE_TAIL"


class ZeroMeanError(RwtreeError):
    code = "ZERO_MEAN"


class NotCenteredError(RwtreeError):
    code = "NOT_CENTERED"


class TooManyComponentsError(RwtreeError):
    code = "TOO_MANY_COMPONENTS"


class DivergedError(RwtreeError):
    code = "DIVERGED"


class DegeneratePointsError(RwtreeError):
    code = "DEGENERATE_POINTS"


class WrongRegimeError(RwtreeError):
    code = "WRONG_REGIME"


class ConfigError(RwtreeError):
    code = "CONFIG"
