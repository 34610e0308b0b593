"""Census tools for Cayley graphs of small groups and their automorphisms."""

__version__ = "0.1.0"
