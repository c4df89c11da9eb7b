"""Permutation processes, permutons and their Wasserstein geometry."""

__version__ = "0.1.0"
