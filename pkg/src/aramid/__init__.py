"""aramid: bipartite graph codes over GF(q) with iterative decoding."""

__version__ = "0.1.0"
