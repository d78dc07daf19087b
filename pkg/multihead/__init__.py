"""multihead - multi-head two-way automata, safe-head analysis and constant-randomness verifiers."""

__version__ = "0.1.0"
