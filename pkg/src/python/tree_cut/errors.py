"""
Exceptions raised by the tree_cut library.

The CLI maps these to exit codes (see slot_generalizer.cli); library code never exits.
"""


class TreeCutError(Exception):
    """Base class for all tree_cut errors."""


class ThesaurusFormatError(TreeCutError, ValueError):
    """Malformed thesaurus file. lineno is 1-based, or None for whole-file problems."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)
        self.lineno = lineno


class TriplesFormatError(TreeCutError, ValueError):
    """Malformed triples or PP instance file."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)
        self.lineno = lineno


class EmptySampleError(TreeCutError):
    """No frequency mass for the requested (head, slot)."""


class EnumerationLimitError(TreeCutError):
    """Cut enumeration refused because the tree has more cuts than allowed."""

    def __init__(self, count, limit):
        super().__init__("tree has %d cuts, enumeration limit is %d (use find_mdl)" % (count, limit))
        self.count = count
        self.limit = limit


class UnknownWordError(TreeCutError, KeyError):
    """Word is not in the thesaurus, or not covered by the cut."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConfigError(TreeCutError, ValueError):
    """Invalid run configuration."""
