"""Goldman brackets, Chen transport, and cyclic DGLA checks for surface groups."""

__version__ = "0.1.0"
