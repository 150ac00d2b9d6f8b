from typing import Optional


class DirectednessError(Exception):
    """Base class for domain errors (CLI exit code 1)"""
    pass


class ParseError(DirectednessError):
    """Malformed input file"""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = ""
        if path:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class ConfigError(DirectednessError):
    """Invalid or infeasible configuration"""
    pass


class IntegrityError(DirectednessError):
    """Dataset integrity violated (duplicate ids, overlapping partitions, single-class splits)"""
    pass


class ContractError(DirectednessError):
    """A precondition of an operation does not hold"""
    pass


class DimensionError(ContractError):
    """Operand shapes are incompatible"""
    pass


class TrainingError(DirectednessError):
    """Training diverged or failed"""

    def __init__(self, message: str, step: Optional[int] = None, phase: Optional[str] = None):
        self.step = step
        self.phase = phase
        prefix = ""
        if phase:
            prefix += f"[{phase}] "
        if step is not None:
            prefix += f"step {step}: "
        super().__init__(f"{prefix}{message}")


class RangeTestError(DirectednessError):
    """LR range test could not run (loss diverged at the first step)"""
    pass


class ModelFormatError(DirectednessError):
    """Model file is missing, corrupt or has the wrong architecture"""
    pass
