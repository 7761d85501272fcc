"""Exception types raised by the model and the bench simulator."""


class ModelDomainError(ValueError):
    """Inputs are well-formed but outside what the model can answer."""


class NoBucklingError(ModelDomainError):
    """The slant never reaches its buckling compression within the travel."""


class TargetUnreachableError(ModelDomainError):
    pass


class NonMonotoneError(ModelDomainError):
    pass


class EventNotFoundError(ModelDomainError):
    """A time stamp required for response-time extraction is absent."""


class NeverSwitchedError(ModelDomainError):
    pass
