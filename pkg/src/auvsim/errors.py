"""Exception types shared across the simulator."""


class ParameterError(ValueError):
    """A physical parameter violates its constraints (non-PD inertia, negative mass, ...)."""


class ScenarioError(ValueError):
    """Scenario or mission file failed validation.

    Carries every problem found, each prefixed with the offending field path,
    so a bad config fails loudly at load time with a complete report.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


class ProtocolError(Exception):
    """A bridge peer violated the wire protocol (oversized frame, bad prefix)."""


class SimulationFault(RuntimeError):
    """The simulation produced a non-finite state and was aborted."""

    def __init__(self, message, tick=None):
        self.tick = tick
        if tick is not None:
            message = f"{message} (tick {tick})"
        super().__init__(message)
