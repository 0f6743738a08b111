"""One-way LOCC distinguishability of bipartite state sets."""

__version__ = "0.1.0"
