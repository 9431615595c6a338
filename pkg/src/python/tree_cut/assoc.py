"""
Association baselines: selectional association with argmax-class generalization, lexical
association between a head and a preposition, and the t-score used to gate both.
"""
import logging
import math
from collections import namedtuple

from scipy.stats import norm

from tree_cut.cooccur import SlotSample, assign_frequencies
from tree_cut.errors import UnknownWordError

logger = logging.getLogger(__name__)

DEFAULT_T_THRESHOLD = 1.645
MARGINAL_SCOPES = ("slot", "head", "global")

# class_or_word: label of the winning class; support: size of the (head, slot) sample;
# probability: P(C|head, slot) of the winning class
AssociationScore = namedtuple("AssociationScore", ["class_or_word", "score", "support", "probability", "node_id"])


class CooccurrenceTable:
    """
    Count tables built once per corpus and shared read-only afterwards.

    Holds per-(head, slot) value frequencies, per-head totals and the pooled samples used
    as marginals. Node frequencies are memoized per (sample key, thesaurus).
    """

    def __init__(self, triples):
        self.pairs = {}
        self.by_slot = {}
        self.by_head = {}
        self.corpus = {}
        self.head_totals = {}
        for t in triples:
            for table, key in ((self.pairs, (t.head, t.slot)), (self.by_slot, t.slot), (self.by_head, t.head)):
                freq = table.setdefault(key, {})
                freq[t.value] = freq.get(t.value, 0.0) + t.count
            self.corpus[t.value] = self.corpus.get(t.value, 0.0) + t.count
            self.head_totals[t.head] = self.head_totals.get(t.head, 0.0) + t.count
        self._nf_cache = {}

    @classmethod
    def from_triples(cls, triples):
        return cls(triples)

    def heads(self):
        return list(self.head_totals)

    def head_slots(self):
        """All observed (head, slot) pairs."""
        return list(self.pairs)

    def head_count(self, head):
        return self.head_totals.get(head, 0.0)

    def pair_count(self, head, slot):
        return math.fsum(self.pairs.get((head, slot), {}).values())

    def sample(self, head, slot):
        freq = dict(self.pairs.get((head, slot), {}))
        return SlotSample(head, slot, freq, math.fsum(freq.values()))

    def marginal_sample(self, head, slot, scope="slot"):
        """Sample the marginal P(C) is estimated from: same slot, same head, or the whole corpus."""
        if scope == "slot":
            freq = self.by_slot.get(slot, {})
        elif scope == "head":
            freq = self.by_head.get(head, {})
        elif scope == "global":
            freq = self.corpus
        else:
            raise ValueError("unknown marginal scope %r (expected one of %s)" % (scope, ", ".join(MARGINAL_SCOPES)))
        freq = dict(freq)
        return SlotSample(head if scope == "head" else "*", slot if scope == "slot" else "*", freq, math.fsum(freq.values()))

    def node_frequencies(self, sample, thesaurus):
        key = (sample.head, sample.slot, thesaurus)
        if key not in self._nf_cache:
            self._nf_cache[key] = assign_frequencies(sample, thesaurus)
        return self._nf_cache[key]


def selectional_association(p_c_given_vs, p_c):
    """
    A(v, s, C) = P(C|v,s) log2(P(C|v,s) / P(C)); 0 when P(C|v,s) is 0.

    Raises:
        ValueError: probabilities outside [0, 1], or P(C) = 0 with P(C|v,s) > 0.
    """
    for p in (p_c_given_vs, p_c):
        if not 0.0 <= p <= 1.0:
            raise ValueError("probability out of range: %r" % p)
    if p_c_given_vs == 0:
        return 0.0
    if p_c == 0:
        raise ValueError("P(C) is 0 while P(C|v,s) = %r" % p_c_given_vs)
    return p_c_given_vs * math.log2(p_c_given_vs / p_c)


def _ancestor_classes(word, thesaurus):
    seen = {}
    for node_id in thesaurus.word_index[word]:
        for anc in thesaurus.ancestors(node_id):
            seen.setdefault(anc, None)
    return list(seen)


def sa_generalize(word, head, slot, table, thesaurus, marginal="slot"):
    """
    The class among word's ancestors (its own nodes and the root included) with maximal
    selectional association for (head, slot). Ties go to the deepest class, then the
    leftmost. Probabilities are raw MLE over sense-split node frequencies.

    Raises:
        UnknownWordError: word is not in the thesaurus.
    """
    if word not in thesaurus:
        raise UnknownWordError("word %r is not in the thesaurus" % word)
    nf_vs = table.node_frequencies(table.sample(head, slot), thesaurus)
    nf_c = table.node_frequencies(table.marginal_sample(head, slot, marginal), thesaurus)

    best = None
    for node_id in _ancestor_classes(word, thesaurus):
        p_vs = nf_vs.by_node[node_id] / nf_vs.total if nf_vs.total > 0 else 0.0
        p_c = nf_c.by_node[node_id] / nf_c.total if nf_c.total > 0 else 0.0
        score = selectional_association(min(p_vs, 1.0), min(p_c, 1.0))
        key = (score, thesaurus.depth[node_id], -thesaurus.order[node_id])
        if best is None or key > best[0]:
            best = (key, AssociationScore(thesaurus.label(node_id), score, nf_vs.total, p_vs, node_id))
    return best[1]


def sa_table(head, slot, table, thesaurus, threshold=0.0, marginal="slot"):
    """
    Argmax SA class of every observed value of (head, slot), one row per class, sorted by
    descending score. Classes scoring at or below threshold are left out.
    """
    rows = {}
    for word in table.sample(head, slot).freq:
        if word not in thesaurus:
            continue
        score = sa_generalize(word, head, slot, table, thesaurus, marginal=marginal)
        if score.score > threshold and (score.node_id not in rows or score.score > rows[score.node_id].score):
            rows[score.node_id] = score
    return sorted(rows.values(), key=lambda s: (-s.score, thesaurus.order[s.node_id]))


def lexical_association(prep, head, table):
    """(P(prep|head), count(head)); (0, 0) for an unseen head."""
    n = table.head_count(head)
    if n <= 0:
        return 0.0, 0.0
    return table.pair_count(head, prep) / n, n


def t_score(p1, n1, p2, n2):
    """
    Two-proportion t-score (p1 - p2) / sqrt(p1(1-p1)/n1 + p2(1-p2)/n2).

    0 when either sample is empty; +-inf when both variances vanish but p1 != p2.
    """
    if n1 <= 0 or n2 <= 0:
        return 0.0
    diff = p1 - p2
    var = p1 * (1.0 - p1) / n1 + p2 * (1.0 - p2) / n2
    if var <= 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / math.sqrt(var)


def t_threshold_for(significance):
    """One-sided critical value at the given significance level (0.95 -> 1.645)."""
    if not 0.0 < significance < 1.0:
        raise ValueError("significance must be in (0, 1), got %r" % significance)
    return float(norm.ppf(significance))
