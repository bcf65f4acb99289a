"""Exact certificates of injectivity for phase-retrieval frames."""

__version__ = "0.1.0"
