"""Constructive detection of essential surfaces through ideal points of
induced-representation curves and Bruhat-Tits lattice classes."""

__version__ = "0.1.0"
