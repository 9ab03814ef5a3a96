"""Utility modules: environment config, logging, errors and CSV helpers."""
