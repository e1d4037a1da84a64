"""Reidemeister I/III move engine for link diagrams on the sphere."""

from .diagram import Diagram, DiagramError, Face, parse, parse_pd, parse_gauss, serialize

__all__ = [
    "Diagram", "DiagramError", "Face",
    "parse", "parse_pd", "parse_gauss", "serialize",
]
