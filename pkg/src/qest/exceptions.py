class ModelError(ValueError):
    """An estimation model violates a domain requirement."""


class SingularModel(ModelError):
    """The quantum Fisher information is singular: parameters are not locally identifiable."""


class ModelNotRegular(ModelError):
    """A mixed-state derivative leaks outside the support of the state."""


class WrongBranchError(ValueError):
    """A construction was requested for the wrong incompatibility regime."""
