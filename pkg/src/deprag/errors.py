"""Shared exception base for the engine.

Every data-level failure raised by this package derives from EngineError so
the CLI can map them to a single exit code while usage errors stay separate.
"""


class EngineError(Exception):
    """Base class for all recoverable data errors raised by deprag."""
