"""Exception types raised by the ghostfree package."""


class GhostfreeError(Exception):
    """Base class for all computation and constraint failures."""


class NonCanonicalMap(GhostfreeError):
    """A linear map fails to preserve the canonical commutation relations."""


class NotHermitian(GhostfreeError):
    pass


class SingularExponent(GhostfreeError):
    """A transformed Gaussian leaves the Gaussian class (pole of the exponent map)."""


class ChiSingular(SingularExponent):
    pass


class SigmaZero(GhostfreeError):
    pass


class SingularChoice(GhostfreeError):
    pass


class ThetaOutOfRange(GhostfreeError):
    def __init__(self, theta):
        self.theta = theta
        super().__init__(f"|Theta| >= 1 (Theta = {theta!r})")


class OmegaInconsistent(GhostfreeError):
    pass


class LambdaZero(GhostfreeError):
    pass


class NoSignChange(GhostfreeError):
    pass
