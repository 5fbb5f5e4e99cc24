"""Reference interpreter for the assignment calculus (alias, copy and move)."""

__version__ = "0.1.0"
