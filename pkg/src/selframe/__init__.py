"""Finite-model toolkit for semilattice semantics of conditional positive logic."""

from __future__ import annotations

__version__ = "0.1.0"
