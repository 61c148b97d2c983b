"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters, presets, or experiment configuration."""


class UndefinedStatisticError(ValueError):
    """A statistic or arm index was requested for an arm with no pulls."""


class TheoryDomainError(ValueError):
    """A bound or constant was evaluated outside the region where it is defined."""
