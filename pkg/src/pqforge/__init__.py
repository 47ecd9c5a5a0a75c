"""Entropy-driven post-quantum parameter estimation under a decoherence-limited adversary."""

__version__ = "0.1.0"
