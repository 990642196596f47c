"""Event-based geopolitical relation indices and dynamic panel growth estimation."""

__version__ = "0.1.0"
