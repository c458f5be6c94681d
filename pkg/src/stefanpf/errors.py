"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, parameters or run configuration.

    ``key`` names the offending configuration key when there is one.
    """

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line


class UsageError(ValueError):
    """An operation was called with arguments outside its contract."""


class StabilityError(RuntimeError):
    """Requested time step exceeds the explicit-Euler stability bound."""

    def __init__(self, dt, bound, what=""):
        msg = f"dt={dt:.6g} exceeds stability bound {bound:.6g}"
        if what:
            msg += f" ({what})"
        super().__init__(msg)
        self.dt = dt
        self.bound = bound


class InterfaceDetectionError(ValueError):
    """A level crossing could not be located uniquely."""

    def __init__(self, message, crossings=0):
        super().__init__(message)
        self.crossings = crossings


class SimulationAborted(RuntimeError):
    """A run produced non-finite values."""

    def __init__(self, step, message="non-finite values detected"):
        super().__init__(f"{message} at step {step}")
        self.step = step


class NonConvergence(RuntimeError):
    """A moving-frame relaxation ran out of iterations."""

    def __init__(self, residual, iterations):
        super().__init__(f"relaxation did not converge: residual {residual:.3e} after {iterations} iterations")
        self.residual = residual
        self.iterations = iterations
