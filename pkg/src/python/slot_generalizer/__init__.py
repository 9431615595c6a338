"""slot_generalizer: command-line front end for tree cut generalization and PP-attachment runs."""

__version__ = "0.1.0"
