"""Exception types shared across the package."""


class ExdecError(Exception):
    pass


class InputError(ExdecError, ValueError):
    """Malformed input: bad vertex ids, bad edge-list lines, edgeless graphs."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateCutError(ExdecError, ValueError):
    pass


class ZeroWeightError(ExdecError, ZeroDivisionError):
    pass


class StructureError(ExdecError):
    """Link-cut forest misuse (cycles, non-root links, missing edges)."""


class ReplayError(ExdecError):
    pass


class ContractError(ExdecError):
    pass


class SizeGuardError(ExdecError):
    """Raised by brute-force routines when the instance is too large to enumerate."""
