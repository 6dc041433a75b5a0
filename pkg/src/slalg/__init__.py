"""Weighted convolution algebras on totally ordered semilattices."""

from __future__ import annotations

import mpmath

from .weights import precision

__version__ = "0.1.0"

# float-mode element arithmetic runs at the ambient mpmath precision
mpmath.mp.prec = max(mpmath.mp.prec, precision())
