"""Short hybrid exponential sums over plane curves mod p."""

__version__ = "0.1.0"
