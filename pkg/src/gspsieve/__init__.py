"""Computational companion for surjectivity of GSp Galois images of genus-2 Jacobians."""

from __future__ import annotations

__version__ = "0.1.0"
