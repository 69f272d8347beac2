"""Exception types raised by the library."""


class MacroprobError(Exception):
    """Base class for all library errors."""


class ContractViolation(MacroprobError, ValueError):
    """An input violated a documented precondition (normalization, hermiticity, ...)."""


class InvalidArgument(MacroprobError, ValueError):
    """An argument is outside the supported range."""


class ImpossibleOutcomeError(MacroprobError):
    """A post-selection was requested on an outcome of zero amplitude."""

    def __init__(self, n_plus: int, n: int, amplitude: complex):
        self.n_plus = n_plus
        self.n = n
        self.amplitude = amplitude
        super().__init__(
            f"outcome n_plus={n_plus} of N={n} has amplitude {amplitude!r}; "
            "the conditional pointer state is undefined"
        )


class SingularSystemError(MacroprobError, ValueError):
    """The moment system has repeated eigenvalues."""


class InconsistentMomentsError(MacroprobError, ValueError):
    """The moments are not realizable by any probability vector."""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(
            f"recovered probability {index} is {value:.3e}; "
            "moments are not realizable by a probability vector"
        )


class ConfigError(MacroprobError, ValueError):
    """An experiment configuration failed validation."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
