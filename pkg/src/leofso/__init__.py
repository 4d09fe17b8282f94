"""State-coupled joint fading model for LEO satellite-to-ground optical downlinks."""

__version__ = "0.1.0"
