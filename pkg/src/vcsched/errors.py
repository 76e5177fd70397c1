"""Exception types shared across the toolkit."""


class VcschedError(Exception):
    """Base class for all toolkit errors."""


# --- channel / cost formulas ---

class NonPositiveBreakpoint(VcschedError):
    """Antenna heights and wavelength yield a breakpoint distance <= 0."""


class BelowReferenceDistance(VcschedError):
    """Path loss queried below the model's reference distance."""


class ZeroDistance(VcschedError):
    """Air-to-ground gain queried at zero separation."""


class NegativePower(VcschedError):
    """Transmission power must be non-negative."""


class MissingRate(VcschedError):
    """A service provider in use has no positive transmission rate."""


class NotATaskEdge(VcschedError):
    """Component pair is not an edge of the owning task graph."""


# --- scenario generation and I/O ---

class UnsatisfiableSpec(VcschedError):
    """Generation spec cannot be realised (impossible counts, empty intervals)."""


class ParseError(VcschedError):
    """Scenario file is malformed; message names the offending field."""


class SchemaVersionMismatch(VcschedError):
    """Scenario file carries an unsupported schema version."""


# --- template search ---

class PredecessorUnmapped(VcschedError):
    """Candidate filtering requires every predecessor to be placed first."""


class InstanceTooLarge(VcschedError):
    """Exhaustive search refused: the assignment space exceeds the guard."""


# --- power allocation ---

class TemplateInfeasibleForAlpha1(VcschedError):
    """A cross-provider edge cannot meet the contact-probability threshold
    at any transmission rate."""


class HeterogeneousD(VcschedError):
    """Components on a rate-coupled pair carry different data sizes; the
    closed-form gap bound assumes a shared size."""


class Infeasible(VcschedError):
    """No strictly feasible starting point exists for the power program."""


class NumericalFailure(VcschedError):
    """Barrier solve stalled before reaching the target tolerance."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class BaselineInfeasible(VcschedError):
    """A baseline allocator could not produce a feasible allocation."""


# --- scheduling ---

class NoFeasibleSchedule(VcschedError):
    """No template admits a feasible power allocation for every UAV."""

    def __init__(self, message, score_log=()):
        super().__init__(message)
        self.score_log = list(score_log)
