class GossipSimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(GossipSimError, ValueError):
    def __init__(self, field: str, message: str):
        # simpy and joblib rebuild errors from args, which must stay (field, message)
        super().__init__(field, message)
        self.field = field
        self.message = message

    def __str__(self) -> str:
        return f'{self.field}: {self.message}'


class TopologyError(ConfigError):
    pass


class FragmentationError(GossipSimError, ValueError):
    pass


class SimulationInvariantError(GossipSimError, RuntimeError):
    """Raised when the engine reaches a state that only a bug can produce."""
