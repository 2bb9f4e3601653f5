"""Exception hierarchy.

Every domain failure raised by the library derives from :class:`DampedQError`.
The class name is the machine-readable error code surfaced by the CLI.
"""


class DampedQError(ValueError):
    """Base class for domain errors."""

    @property
    def code(self):
        return type(self).__name__


# params
class NonPhysical(DampedQError):
    pass


class CriticalDamping(DampedQError):
    pass


class NotOscillatory(DampedQError):
    pass


class DegenerateCouplings(DampedQError):
    pass


# classical
class StepSizeTooLarge(DampedQError):
    pass


# solder
class DegenerateSum(DampedQError):
    pass


class GaugeDependence(DampedQError):
    pass


class KineticResidue(DampedQError):
    pass


class DimensionMismatch(DampedQError):
    pass


class NotFirstOrder(DampedQError):
    pass


# hamiltonian
class BranchInconsistency(DampedQError):
    pass


class ZeroCoupling(DampedQError):
    pass


# pseudoq
class BadFrequency(DampedQError):
    pass


class VerificationFailed(DampedQError):
    pass


class DefectivePair(DampedQError):
    pass


class PairingAmbiguity(DampedQError):
    pass


class TruncationContaminated(DampedQError):
    pass
