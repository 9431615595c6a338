"""Tree cut models: thesaurus handling, co-occurrence counting, MDL generalization and association baselines."""

__version__ = "0.1.0"
