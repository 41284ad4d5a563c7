"""Adic dynamics on the graph of ordered pairs: group arithmetic, coding,
invariant-measure samplers, and scaled-entropy estimators."""

__version__ = "0.1.0"
