"""Immersion of hypergraph topologies: exact deciders, derivations and a GHZ state-vector check."""

__version__ = "0.1.0"
