"""Ethical monitoring pipeline for customer-service chat."""

__version__ = "0.1.0"
