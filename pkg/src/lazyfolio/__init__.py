"""Deterministic cash/gold/bitcoin portfolio backtesting engine."""

__version__ = "0.1.0"
