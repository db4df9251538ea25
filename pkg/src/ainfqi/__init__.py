"""Exact A∞ quasi-inverses of dg-functors that are objectwise homotopy equivalences."""

__version__ = "0.1.0"
