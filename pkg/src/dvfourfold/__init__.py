"""Exact-arithmetic verification harness for Debarre-Voisin hyperkähler fourfolds."""

__version__ = "0.1.0"
