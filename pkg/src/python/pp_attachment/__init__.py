"""PP-attachment disambiguation with tree cut models, synthetic corpora and learning-curve experiments."""

__version__ = "0.1.0"
