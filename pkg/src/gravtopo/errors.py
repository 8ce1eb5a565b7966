"""Exception types raised by gravtopo."""


class GravtopoError(Exception):
    """Base class for all library errors."""


class DomainError(GravtopoError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class GaugeError(GravtopoError, ValueError):
    """A tensor fails the transverse-traceless (or temporal) gauge conditions."""


class RefinementError(GravtopoError):
    """A mesh or loop is too coarse for the requested lattice computation."""


class ConventionError(GravtopoError):
    """Frame conventions disagree with the closed form they are checked against."""


class NonGaugeConsistentError(GravtopoError):
    """An integral that must be real picked up a non-negligible imaginary part."""


class NonConvergentError(GravtopoError):
    """A finite-difference study failed to show the expected convergence."""
