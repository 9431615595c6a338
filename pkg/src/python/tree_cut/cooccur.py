"""
Co-occurrence data: (head, slot, value) triples and their per-(head, slot) frequencies
over thesaurus nodes.

Triples file: TSV ``head<TAB>slot<TAB>value[<TAB>count]``, UTF-8, ``#`` comments.
"""
import logging
import math
from collections import namedtuple

from tree_cut.errors import TriplesFormatError

logger = logging.getLogger(__name__)

VERB_PREFIX = "verb:"
NOUN_PREFIX = "noun:"

Triple = namedtuple("Triple", ["head", "slot", "value", "count"], defaults=[1.0])

# freq: value word -> frequency; total = sum of freq (|S|)
SlotSample = namedtuple("SlotSample", ["head", "slot", "freq", "total"])

# by_node: node id -> f(C); direct: node id -> mass assigned to the node itself;
# total: mass assigned to the tree; dropped: out-of-thesaurus mass
NodeFrequencies = namedtuple("NodeFrequencies", ["by_node", "direct", "total", "dropped"])


def verb_head(word):
    return VERB_PREFIX + word


def noun_head(word):
    return NOUN_PREFIX + word


def split_head(head):
    """Return (tag, word) where tag is 'verb', 'noun' or None for untagged heads."""
    for tag, prefix in (("verb", VERB_PREFIX), ("noun", NOUN_PREFIX)):
        if head.startswith(prefix):
            return tag, head[len(prefix):]
    return None, head


def parse_triples(text):
    """
    Parse triples TSV content. Counts are reals and default to 1; zero-count lines are skipped.

    Raises:
        TriplesFormatError: wrong column arity, non-numeric or negative count.
    """
    triples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) not in (3, 4):
            raise TriplesFormatError("expected 3 or 4 tab-separated columns, got %d" % len(cols), lineno)
        head, slot, value = (c.strip() for c in cols[:3])
        if not head or not slot or not value:
            raise TriplesFormatError("empty head, slot or value", lineno)
        count = 1.0
        if len(cols) == 4:
            try:
                count = float(cols[3])
            except ValueError:
                raise TriplesFormatError("non-numeric count %r" % cols[3], lineno)
            if not math.isfinite(count) or count < 0:
                raise TriplesFormatError("count must be a finite nonnegative number, got %r" % cols[3], lineno)
            if count == 0:
                logger.debug("line %d: zero count, skipped", lineno)
                continue
        triples.append(Triple(head, slot, value, count))
    return triples


def load_triples(path):
    with open(path, encoding="utf-8") as f:
        return parse_triples(f.read())


def format_triples(triples, header=True):
    """Serialize triples to TSV. Integral counts are written without a decimal point."""
    lines = ["# head\tslot\tvalue\tcount"] if header else []
    for t in triples:
        count = int(t.count) if float(t.count).is_integer() else t.count
        lines.append("%s\t%s\t%s\t%s" % (t.head, t.slot, t.value, count))
    return "\n".join(lines) + "\n"


def slot_sample(triples, head, slot):
    """Frequencies of the values filling (head, slot). No matches gives total 0."""
    counts = {}
    for t in triples:
        if t.head == head and t.slot == slot and t.count > 0:
            counts.setdefault(t.value, []).append(t.count)
    freq = {value: math.fsum(c) for value, c in counts.items()}
    return SlotSample(head, slot, freq, math.fsum(freq.values()))


def assign_frequencies(sample, thesaurus):
    """
    Distribute a SlotSample over thesaurus nodes.

    Each word's frequency is split equally among all nodes carrying it; internal node
    frequencies are the sum over their children plus their own share. Words missing from
    the thesaurus are dropped and their mass reported in NodeFrequencies.dropped.
    """
    direct = {}
    dropped = 0.0
    for word, f in sample.freq.items():
        if f <= 0:
            continue
        node_ids = thesaurus.word_index.get(word)
        if not node_ids:
            dropped += f
            continue
        share = f / len(node_ids)
        for node_id in node_ids:
            direct[node_id] = direct.get(node_id, 0.0) + share

    by_node = {}
    for node in thesaurus.root.iter_postorder():
        by_node[node.id] = direct.get(node.id, 0.0) + math.fsum(by_node[c.id] for c in node.children)

    if dropped > 0:
        logger.warning("%s/%s: dropped %g of %g frequency mass for words missing from the thesaurus",
                       sample.head, sample.slot, dropped, sample.total)
    return NodeFrequencies(by_node, direct, by_node[thesaurus.root.id], dropped)
