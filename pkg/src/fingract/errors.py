"""Base exception for everything this package raises on purpose."""


class FingractError(Exception):
    """Common ancestor so batch runners can isolate per-sample failures."""
