"""Nice Heegaard diagrams and knot Floer homology."""
from .diagram import Diagram, MalformedDiagram, MetricsSnapshot, canonical, load, parse, serialize

__all__ = ["Diagram", "MalformedDiagram", "MetricsSnapshot", "canonical", "load", "parse", "serialize"]
