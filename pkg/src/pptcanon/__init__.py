"""Canonical form and separability certificates for rank-N PPT states on C^K x C^M x C^N."""

__version__ = "0.1.0"
