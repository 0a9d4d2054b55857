"""Interactive source code search with clarifying-question query refinement."""

__version__ = "0.1.0"
