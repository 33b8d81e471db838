"""Ontological metadata trader: typed trading protocols, a three-level
document store, query routing, a configuration DSL, and deployment-plan
generation."""

__version__ = "0.1.0"
