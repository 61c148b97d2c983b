"""Residual bootstrap exploration (ReBoot) and baseline bandit policies."""

__version__ = "0.1.0"
