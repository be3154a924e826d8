"""Max distance among random walkers on Z^d and on the comb."""

__version__ = "1.0.0"
