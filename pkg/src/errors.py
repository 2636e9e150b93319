"""Error hierarchy shared by the solvers, loaders and the experiment runner"""

from typing import Optional


class NetGameError(Exception):
    """Base class for every error raised by this package"""

    exit_code = 1


class ConfigError(NetGameError):
    """Invalid experiment or runner configuration"""

    exit_code = 2


class ParameterError(ConfigError, ValueError):
    """A parameter is out of range or inconsistent with the others"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DataError(NetGameError):
    """Input data could not be parsed or has the wrong shape"""

    exit_code = 3

    def __init__(self, message: str, rows: Optional[int] = None, cols: Optional[int] = None):
        self.rows = rows
        self.cols = cols
        if rows is not None and cols is not None:
            message = f"{message} (got {rows} rows x {cols} columns)"
        super().__init__(message)


class ContractViolation(NetGameError, ValueError):
    """A caller broke a function precondition (shape, symmetry)"""

    exit_code = 3


class NumericalError(NetGameError):
    """A factorization or solve failed"""

    exit_code = 4


class AssumptionViolation(NumericalError):
    """The game violates rho(beta*G) < 1, so the equilibrium is not unique/stable"""

    def __init__(self, rho: float):
        self.rho = rho
        super().__init__(f"spectral radius rho(beta*G) = {rho:.6g} >= 1")


class UndefinedMetricError(NumericalError):
    """A score is undefined for the given inputs (e.g. no positive pairs)"""
