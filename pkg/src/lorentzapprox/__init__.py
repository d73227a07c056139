"""Best approximation in Lorentz sequence spaces and discretized function spaces."""

__version__ = "0.1.0"
