"""Spectral sparsification of undirected and directed hypergraphs."""

from . import generators
from .directed import DirectedConfig, directed_sparsify, overlap_brute, overlap_peel
from .hypercore import (
    DegenerateCutError,
    DirectedHypergraph,
    Hypergraph,
    HypergraphError,
    Sparsifier,
    VertexPartition,
    contract,
    cut_value,
    directed_energy,
    energy,
)
from .io import read_any, read_directed, read_hypergraph, write_directed, write_hypergraph
from .oracle import evaluate_sparsifier
from .pipeline import PipelineConfig, sparsify

__version__ = "0.1.0"

__all__ = [
    "DegenerateCutError",
    "DirectedConfig",
    "DirectedHypergraph",
    "Hypergraph",
    "HypergraphError",
    "PipelineConfig",
    "Sparsifier",
    "VertexPartition",
    "contract",
    "cut_value",
    "directed_energy",
    "directed_sparsify",
    "energy",
    "evaluate_sparsifier",
    "generators",
    "overlap_brute",
    "overlap_peel",
    "read_any",
    "read_directed",
    "read_hypergraph",
    "sparsify",
    "write_directed",
    "write_hypergraph",
]
