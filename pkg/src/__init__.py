"""
Task-oriented CSI quantization toolkit.

Designs the decision-optimal partition of the channel-gain space for a
discrete power-allocation set, trains a small neural surrogate of it and
measures optimality loss and compression rate by Monte Carlo simulation.
"""

__version__ = "0.1.0"
