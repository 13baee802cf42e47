"""Endorsement-graph stance classification, polarization features and engagement models."""

__version__ = "0.1.0"
