"""Pseudorandom codes, their distributions, watermarking and distinguishers."""
from __future__ import annotations

__version__ = "0.1.0"
