"""Exception hierarchy for the solver pipeline."""


class VdwWedgeError(Exception):
    """Base class for all solver errors."""


class DomainError(VdwWedgeError):
    """Input outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation at a removable-coefficient singularity (e.g. p'' = 0)."""


class NoNonconvexWindow(VdwWedgeError):
    """The isentrope has fewer than two inflection points."""


class NewtonDivergence(VdwWedgeError):
    """Damped Newton iteration failed to converge."""


class BracketFailure(VdwWedgeError):
    """A root bracket did not change sign."""


class InadmissiblePair(VdwWedgeError):
    """Shock pairing violates the extended entropy condition."""


class NegativeMassFluxSq(VdwWedgeError):
    """The squared mass flux of a pairing came out non-positive."""


class QuadratureFailure(VdwWedgeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class SubsonicState(VdwWedgeError):
    """Characteristic data requested at a pseudo-subsonic state."""


class OdeStepFailure(VdwWedgeError):
    """Adaptive ODE integration failed."""


class MachAngleOutOfRange(VdwWedgeError):
    """Mach angle left (0, pi/2) during a boundary-curve integration."""


class NonConvergentNode(VdwWedgeError):
    """Fixed-point iteration for a grid node failed to converge."""


class CharacteristicFold(VdwWedgeError):
    """Characteristics of one family crossed inside a patch."""


class ShockExitsPatch(VdwWedgeError):
    """Tracked shock left the supporting solution patch."""


class PairingDomainError(DomainError):
    """Front volume left the post-sonic pairing domain."""


class IntegrationFailure(VdwWedgeError):
    """Shock-fitting ODE integration failed."""


class MachAngleDegenerate(VdwWedgeError):
    """Mach angle approached 0 or pi/2 in a hodograph solve."""


class NonSpacelikeData(VdwWedgeError):
    """Cauchy data curve is not space-like for the hodograph system."""


class FoldDetected(VdwWedgeError):
    """Hodograph inversion produced negatively oriented cells."""

    def __init__(self, message, cells=None):
        super().__init__(message)
        self.cells = cells or []


class EpsilonTooLarge(VdwWedgeError):
    """DGP offset epsilon too large; retry with a smaller value."""


class NoTurningPoint(VdwWedgeError):
    """Centered-wave turning quadrature has no solution."""


class OdeFailure(VdwWedgeError):
    """Principal-part ODE integration failed."""


class InvariantRegionExit(VdwWedgeError):
    """A marched state left the invariant region."""

    def __init__(self, message, node=None, face=None):
        super().__init__(message)
        self.node = node
        self.face = face


class LevelCurveTangency(VdwWedgeError):
    """A level curve developed a characteristic direction."""


class GapDetected(VdwWedgeError):
    """Assembled patches leave uncovered area beyond stitching tolerance."""


class ConfigError(VdwWedgeError):
    """Invalid run configuration."""


class MissingArtifact(VdwWedgeError):
    """Expected pipeline artifact not found on disk."""


class SchemaMismatch(VdwWedgeError):
    """Stored artifact has an unknown schema version or column set."""


class StageError(VdwWedgeError):
    """Wraps a module error with pipeline stage provenance."""

    def __init__(self, stage, original):
        super().__init__(f"stage '{stage}': {original}")
        self.stage = stage
        self.original = original
