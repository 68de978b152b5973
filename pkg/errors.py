"""Exception types shared by the decontamination modules."""


class ImmunityError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(ImmunityError, ValueError):
    """A parameter lies outside its family's or algorithm's valid domain."""


class StructureError(ImmunityError, ValueError):
    """The graph is disconnected, cyclic where a tree is required, or malformed."""


class ContractError(ImmunityError, ValueError):
    """An operation was called against its contract (illegal move, empty placement, bad subset)."""


class ApplicabilityError(ContractError):
    """A strategy was asked to run on a topology it does not handle."""


class ResourceError(ImmunityError, RuntimeError):
    """A search or enumeration would exceed its configured budget."""


class InvariantError(ImmunityError, RuntimeError):
    """A property that must hold between modules was observed to fail."""
