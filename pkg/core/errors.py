"""
Model: N/A (plumbing).
Purpose: Exception hierarchy shared by every solver, the CLI and the JSON API.
Dependencies: None.
Ext Hooks: New failure kinds subclass SolverFailure (exit 2) or InvariantViolation (exit 3).
"""


class HomogenizationError(Exception):
    """Root of all errors raised by the lab."""
    exit_code = 1


class SolverFailure(HomogenizationError):
    """A numerical method failed to produce a trustworthy answer."""
    exit_code = 2


class InvariantViolation(HomogenizationError, ValueError):
    """Inputs or outputs break a stated invariant or precondition."""
    exit_code = 3


# Solver failures
class NoPositiveEigenvector(SolverFailure):
    pass


class NonConvergence(SolverFailure):
    pass


class NewtonDiverged(SolverFailure):
    pass


class Underflow(SolverFailure):
    pass


class SolveFailure(SolverFailure):
    pass


class NullspaceDegenerate(SolverFailure):
    pass


class QuadratureFailure(SolverFailure):
    pass


class CFLViolation(SolverFailure):
    pass


class ResolutionRefused(SolverFailure):
    pass


class IoFailure(SolverFailure):
    pass


# Invariant violations
class MismatchedSolutions(InvariantViolation):
    pass


class NotPositiveDefinite(InvariantViolation):
    pass


class OperatingRangeError(InvariantViolation):
    pass


class NoQuadraticGrowth(InvariantViolation):
    pass


class ConfigError(InvariantViolation):
    pass
