"""Asymmetric Bayesian wavelet shrinkage under a point-mass + beta prior."""

__version__ = "0.1.0"
