"""Graphs to fields and back: function-field towers, their numeric presentations, and decoding."""

__version__ = "0.1.0"
