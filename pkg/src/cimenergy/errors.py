"""Exception hierarchy shared by the models, simulators and CLI."""


class CimEnergyError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1


class InvalidArgumentError(CimEnergyError, ValueError):
    exit_code = 2


class DomainError(InvalidArgumentError):
    """A physical quantity lies outside the range where a model is valid."""


class ParseError(CimEnergyError, ValueError):
    exit_code = 3

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class ConfigurationError(CimEnergyError, KeyError):
    exit_code = 4

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class UnsupportedWorkloadError(CimEnergyError):
    exit_code = 5
