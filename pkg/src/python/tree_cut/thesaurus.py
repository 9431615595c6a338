"""
Thesaurus trees used as prior knowledge for slot generalization.

A thesaurus is an immutable rooted tree: internal nodes are noun classes, leaves carry
member words. The same word string may sit on several nodes (sense-annotated form),
which stands in for multiple inheritance.

File format (UTF-8, one node per line):

    ANIMAL
    \tBIRD
    \t\tswallow
    \t\tcar@n9: car,auto

Depth is the number of leading tabs. A line is ``label[@id][: w1,w2,...]``; a line
without children is a leaf whose member list defaults to its label. Blank lines and
``#`` comments are ignored. Node ids are synthesized from preorder position (n0, n1, ...)
unless given explicitly with ``@id``.
"""
import logging
import re
from collections import namedtuple

from tree_cut.errors import EnumerationLimitError, ThesaurusFormatError

logger = logging.getLogger(__name__)

LINE_RE = re.compile(r"^(?P<label>[^:@\t]+?)\s*(?:@(?P<id>[^:\s]+))?\s*(?::(?P<members>.*))?$")

# A cut is a set of node ids partitioning the leaves of a subtree, in left-to-right order.
Cut = namedtuple("Cut", ["nodes"])


class ThesaurusNode:
    """One node of the thesaurus. Immutable once built."""

    __slots__ = ("id", "label", "members", "children")

    def __init__(self, node_id, label, members=(), children=()):
        object.__setattr__(self, "id", node_id)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "members", tuple(dict.fromkeys(members)))
        object.__setattr__(self, "children", tuple(children))

    def __setattr__(self, name, value):
        raise AttributeError("ThesaurusNode is immutable")

    @property
    def is_leaf(self):
        return not self.children

    def iter_preorder(self):
        """Yield the nodes of this subtree, parents before children, left to right."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def iter_postorder(self):
        """Yield the nodes of this subtree, children before parents, left to right."""
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded or not node.children:
                yield node
                continue
            stack.append((node, True))
            for child in reversed(node.children):
                stack.append((child, False))

    def __repr__(self):
        return "ThesaurusNode(id=%r, label=%r, members=%r, children=%d)" % (
            self.id, self.label, self.members, len(self.children))


class Thesaurus:
    """
    A thesaurus tree plus the indices every algorithm needs.

    Attributes:
        root: root ThesaurusNode
        word_index: word -> tuple of node ids carrying it (tree order)
        nodes: node id -> ThesaurusNode
        parent: node id -> parent node id (root maps to None)
        depth: node id -> depth (root is 0)
        units: node id -> number of (node, member word) pairs in the subtree, i.e. |C|
    """

    def __init__(self, root):
        self.root = root
        self.nodes = {}
        self.parent = {root.id: None}
        self.depth = {root.id: 0}
        self.order = {}
        word_index = {}

        for idx, node in enumerate(root.iter_preorder()):
            if node.id in self.nodes:
                raise ThesaurusFormatError("duplicate node id %r" % node.id)
            if node.is_leaf and not node.members:
                raise ThesaurusFormatError("leaf %r has no member word" % node.label)
            self.nodes[node.id] = node
            self.order[node.id] = idx
            for child in node.children:
                self.parent[child.id] = node.id
                self.depth[child.id] = self.depth[node.id] + 1
            for word in node.members:
                word_index.setdefault(word, []).append(node.id)

        self.word_index = {w: tuple(ids) for w, ids in word_index.items()}

        self.units = {}
        for node in root.iter_postorder():
            self.units[node.id] = len(node.members) + sum(self.units[c.id] for c in node.children)

    def __contains__(self, word):
        return word in self.word_index

    def __len__(self):
        return len(self.nodes)

    def node(self, node_id):
        return self.nodes[node_id]

    def label(self, node_id):
        return self.nodes[node_id].label

    def words(self):
        """All member words, in order of first appearance."""
        return list(self.word_index)

    def leaves(self, node=None):
        """Leaf nodes under node (default: root), left to right."""
        node = node or self.root
        return [n for n in node.iter_preorder() if n.is_leaf]

    def ancestors(self, node_id):
        """Node ids from node_id up to the root, both included."""
        chain = []
        while node_id is not None:
            chain.append(node_id)
            node_id = self.parent[node_id]
        return chain

    def __repr__(self):
        return "Thesaurus(root=%r, nodes=%d, words=%d)" % (self.root.label, len(self.nodes), len(self.word_index))


def parse_thesaurus(text):
    """
    Parse thesaurus file content into a Thesaurus.

    Raises:
        ThesaurusFormatError: malformed indentation, empty tree, leaf without member
            word, duplicate node id.
    """
    entries = []  # [depth, label, explicit_id, members or None, child indices, lineno]
    stack = []
    prev_depth = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        depth = len(line) - len(line.lstrip("\t"))
        body = line[depth:].rstrip()
        if body[:1].isspace():
            raise ThesaurusFormatError("indentation must use tabs only", lineno)
        if prev_depth is None:
            if depth != 0:
                raise ThesaurusFormatError("first node must not be indented", lineno)
        elif depth == 0:
            raise ThesaurusFormatError("more than one root node", lineno)
        elif depth > prev_depth + 1:
            raise ThesaurusFormatError("indentation jumps from depth %d to %d" % (prev_depth, depth), lineno)

        m = LINE_RE.match(body)
        if not m:
            raise ThesaurusFormatError("cannot parse node line %r" % body, lineno)
        members = None
        if m.group("members") is not None:
            members = [w.strip() for w in m.group("members").split(",") if w.strip()]

        entry = [depth, m.group("label").strip(), m.group("id"), members, [], lineno]
        del stack[depth:]
        if stack:
            stack[-1][4].append(len(entries))
        stack.append(entry)
        entries.append(entry)
        prev_depth = depth

    if not entries:
        raise ThesaurusFormatError("empty thesaurus")

    ids = {}
    for idx, entry in enumerate(entries):
        node_id = entry[2] or "n%d" % idx
        if node_id in ids:
            raise ThesaurusFormatError("duplicate node id %r (first used on line %d)" % (node_id, ids[node_id]), entry[5])
        ids[node_id] = entry[5]
        entry[2] = node_id

    # children follow their parent in preorder, so building back to front sees them first
    built = [None] * len(entries)
    for idx in range(len(entries) - 1, -1, -1):
        _, label, node_id, members, children, lineno = entries[idx]
        if not children:
            if members is None:
                members = [label]
            elif not members:
                raise ThesaurusFormatError("leaf %r has no member word" % label, lineno)
        built[idx] = ThesaurusNode(node_id, label, members or (), [built[c] for c in children])
        for c in children:
            built[c] = None

    thesaurus = Thesaurus(built[0])
    logger.debug("Parsed thesaurus: %d nodes, %d leaves, %d words",
                 len(thesaurus), len(thesaurus.leaves()), len(thesaurus.word_index))
    return thesaurus


def load_thesaurus(path):
    """Read and parse a thesaurus file."""
    with open(path, encoding="utf-8") as f:
        return parse_thesaurus(f.read())


def format_thesaurus(thesaurus):
    """Serialize a Thesaurus back to the file format (inverse of parse_thesaurus)."""
    lines = []
    stack = [(thesaurus.root, 0)]
    while stack:
        node, depth = stack.pop()
        text = node.label
        if node.id != "n%d" % thesaurus.order[node.id]:
            text += "@%s" % node.id
        if node.members and not (node.is_leaf and node.members == (node.label,)):
            text += ": " + ",".join(node.members)
        lines.append("\t" * depth + text)
        stack.extend((c, depth + 1) for c in reversed(node.children))
    return "\n".join(lines) + "\n"


def count_cuts(node):
    """
    Number of cuts of the subtree rooted at node: 1 for a leaf, 1 + product of the
    children's counts otherwise. Python ints never overflow, so the count is exact.
    """
    counts = {}
    for n in node.iter_postorder():
        if n.is_leaf:
            counts[n.id] = 1
        else:
            prod = 1
            for c in n.children:
                prod *= counts.pop(c.id)
            counts[n.id] = 1 + prod
    return counts[node.id]


def enumerate_cuts(node, limit):
    """
    Every cut of the subtree rooted at node, each exactly once.

    Order: the single-node cut first, then the combinations of the children's cuts
    with the leftmost child varying slowest.

    Raises:
        EnumerationLimitError: count_cuts(node) > limit.
    """
    total = count_cuts(node)
    if total > limit:
        raise EnumerationLimitError(total, limit)

    cuts = {}
    for n in node.iter_postorder():
        combos = [()]
        for c in n.children:
            child_cuts = cuts.pop(c.id)
            combos = [prefix + suffix for prefix in combos for suffix in child_cuts]
        cuts[n.id] = [(n.id,)] + (combos if n.children else [])
    return [Cut(nodes) for nodes in cuts[node.id]]


def is_valid_cut(cut, thesaurus, node=None):
    """True if cut's nodes dominate pairwise disjoint leaf sets covering the subtree's leaves."""
    node = node or thesaurus.root
    expected = [leaf.id for leaf in thesaurus.leaves(node)]
    covered = []
    for node_id in cut.nodes:
        if node_id not in thesaurus.nodes:
            return False
        covered.extend(leaf.id for leaf in thesaurus.leaves(thesaurus.node(node_id)))
    return len(covered) == len(set(covered)) and sorted(covered) == sorted(expected)


def prune_observed_subtrees(thesaurus, observed):
    """
    Turn every node carrying a direct member word in observed into a leaf.

    Returns the same Thesaurus object when nothing changes.
    """
    observed = set(observed)
    if not any(not n.is_leaf and observed.intersection(n.members) for n in thesaurus.nodes.values()):
        return thesaurus

    rebuilt = {}
    pruned = 0
    for n in thesaurus.root.iter_postorder():
        if n.is_leaf:
            rebuilt[n.id] = n
        elif observed.intersection(n.members):
            for d in n.iter_preorder():
                rebuilt.pop(d.id, None)
            rebuilt[n.id] = ThesaurusNode(n.id, n.label, n.members)
            pruned += 1
        else:
            rebuilt[n.id] = ThesaurusNode(n.id, n.label, n.members, [rebuilt.pop(c.id) for c in n.children])
    logger.debug("Pruned %d subtrees rooted at observed words", pruned)
    return Thesaurus(rebuilt[thesaurus.root.id])


def cut_labels(cut, thesaurus):
    """Labels of the cut's nodes, for display."""
    return [thesaurus.label(node_id) for node_id in cut.nodes]
