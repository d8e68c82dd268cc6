"""Design Explorer - systematic design space exploration with robust random cut forests."""

__version__ = "0.0.1"
