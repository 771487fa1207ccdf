"""Fourier pricing of claims on the joint law of log price and realized variance
under time-changed Levy models, with a Monte Carlo cross-check."""
__version__ = "0.1.0"
