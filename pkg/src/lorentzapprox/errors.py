"""Exception types raised across the package."""


class LorentzApproxError(Exception):
    """Base class for all errors raised by this package."""


class UnrearrangeableTail(LorentzApproxError):
    """The tail rule is not known to be eventually monotone."""


class ToleranceUnreachable(LorentzApproxError):
    """A certified bound could not be pushed below the requested tolerance."""


class InfiniteVariation(LorentzApproxError):
    """The total variation of a sequence is not certified finite."""


class DegenerateSubspace(LorentzApproxError):
    """Projection onto the span of the zero sequence."""


class CertificateNotUnique(LorentzApproxError):
    """Ties in the rearrangement leave the supporting functional ambiguous."""


class NotStronglyUnique(LorentzApproxError):
    """The best approximation is not a single point."""


class MalformedCertificate(LorentzApproxError):
    """A selection certificate fails a structural check (e.g. injectivity)."""


class Inconclusive(LorentzApproxError):
    """Certified enclosures are too wide to decide at the given tolerance."""


class GridMismatch(LorentzApproxError):
    """Functions or specs defined on incompatible grids."""


class EmptyClass(LorentzApproxError):
    """A constraint class or a set has no members."""
