"""
Tree cut models and MDL model selection.

A tree cut model pairs a cut of the thesaurus with one probability per cut class; every
word under a class C gets P(C)/|C|. Description lengths are in bits (log base 2):

    L = L_mod + L_par + L_dat,  L' = L_par + L_dat

find_mdl returns the cut minimizing L' in one bottom-up pass; find_mdl_brute checks it by
enumerating every cut.
"""
import logging
import math
from collections import namedtuple

from tree_cut.cooccur import assign_frequencies, slot_sample
from tree_cut.errors import EmptySampleError, UnknownWordError
from tree_cut.thesaurus import Cut, count_cuts, cut_labels, enumerate_cuts

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.05
DEFAULT_EXAMPLE_WORDS = 3
DEFAULT_ENUM_LIMIT = 10 ** 6

TreeCutModel = namedtuple("TreeCutModel", ["cut", "params", "sample_total"])
LengthReport = namedtuple("LengthReport", ["model_len", "param_len", "data_len", "l_prime", "total"])
GeneralizationEntry = namedtuple("GeneralizationEntry", ["label", "probability", "examples", "node_id"])
GeneralizationResult = namedtuple("GeneralizationResult", ["head", "slot", "entries", "threshold", "cut"])

__all__ = [
    "TreeCutModel", "LengthReport", "GeneralizationEntry", "GeneralizationResult",
    "mle_estimate", "word_prob", "word_distribution", "data_len", "class_data_len",
    "param_len_free", "param_len_nodes", "model_len", "describe", "length_table",
    "find_mdl", "find_mdl_brute", "find_mdl_model", "mdl_length", "generalize",
    "cut_assignment", "cut_labels",
]


def mle_estimate(cut, nf):
    """
    MLE parameters for a fixed cut: P(C) = f(C) / total.

    Raises:
        EmptySampleError: nf.total is 0.
    """
    if nf.total <= 0:
        raise EmptySampleError("cannot estimate a model from a sample with zero total frequency")
    params = tuple(nf.by_node.get(node_id, 0.0) / nf.total for node_id in cut.nodes)
    return TreeCutModel(cut, params, nf.total + nf.dropped)


def cut_assignment(cut, thesaurus):
    """Map every node at or below the cut to the cut node dominating it."""
    owner = {}
    for node_id in cut.nodes:
        for n in thesaurus.node(node_id).iter_preorder():
            owner[n.id] = node_id
    return owner


def _class_probs(model):
    return dict(zip(model.cut.nodes, model.params))


def _word_prob(word, thesaurus, probs):
    """Smoothed probability of word, or None if no node carrying it lies under the cut."""
    covered = False
    p = 0.0
    for node_id in thesaurus.word_index[word]:
        cur = node_id
        while cur is not None and cur not in probs:
            cur = thesaurus.parent[cur]
        if cur is not None:
            covered = True
            p += probs[cur] / thesaurus.units[cur]
    return p if covered else None


def word_prob(model, thesaurus, word):
    """
    P_M(word): for each node carrying word, the probability of its cut class divided by
    the class size; contributions from several nodes add up.

    Raises:
        UnknownWordError: word is not in the thesaurus or no node carrying it is under the cut.
    """
    if word not in thesaurus:
        raise UnknownWordError("word %r is not in the thesaurus" % word)
    p = _word_prob(word, thesaurus, _class_probs(model))
    if p is None:
        raise UnknownWordError("word %r is not covered by the cut" % word)
    return p


def word_distribution(model, thesaurus):
    """P_M(word) for every word covered by the cut, in one pass over the tree."""
    dist = {}
    for node_id, p in zip(model.cut.nodes, model.params):
        share = p / thesaurus.units[node_id]
        for n in thesaurus.node(node_id).iter_preorder():
            for word in n.members:
                dist[word] = dist.get(word, 0.0) + share
    return dist


def data_len(model, sample, thesaurus):
    """
    L_dat = -sum f(n) log2 P_M(n) over the sample's words.

    Words missing from the thesaurus are skipped (their mass was dropped when counting).
    A word with positive frequency and zero (or no) probability makes the length infinite.
    """
    probs = _class_probs(model)
    terms = []
    for word, f in sample.freq.items():
        if f <= 0 or word not in thesaurus:
            continue
        p = _word_prob(word, thesaurus, probs)
        if not p:
            return math.inf
        terms.append(-f * math.log2(p))
    return math.fsum(terms)


def _class_term(f, units, total):
    if f <= 0:
        return 0.0
    return -f * math.log2(f / (total * units))


def class_data_len(cut, nf, thesaurus):
    """
    Class-level data length -sum f(C) log2(f(C) / (N |C|)), N = nf.total.

    Additive over subtrees; equals data_len when every word sits on a single node.
    Infinite if mass attached directly to a node above the cut cannot be encoded.
    """
    if nf.total <= 0:
        raise EmptySampleError("cannot compute data length for a sample with zero total frequency")
    seen = set()
    for node_id in cut.nodes:
        cur = thesaurus.parent[node_id]
        while cur is not None and cur not in seen:
            if nf.direct.get(cur, 0.0) > 0:
                return math.inf
            seen.add(cur)
            cur = thesaurus.parent[cur]
    return math.fsum(_class_term(nf.by_node.get(n, 0.0), thesaurus.units[n], nf.total) for n in cut.nodes)


def _check_sample_total(sample_total):
    if sample_total < 1:
        raise ValueError("sample size must be at least 1, got %g" % sample_total)


def param_len_free(cut, sample_total):
    """L_par with K = |cut| - 1 free parameters: K/2 log2 |S|."""
    _check_sample_total(sample_total)
    return (len(cut.nodes) - 1) / 2.0 * math.log2(sample_total)


def param_len_nodes(cut, sample_total):
    """L_par counting every cut node: |cut|/2 log2 |S| (used inside Find-MDL)."""
    _check_sample_total(sample_total)
    return len(cut.nodes) / 2.0 * math.log2(sample_total)


def model_len(thesaurus):
    """L_mod = log2 of the number of cuts; the same for every cut of the tree."""
    return math.log2(count_cuts(thesaurus.root))


def _describe(cut, sample, nf, thesaurus, mod_len):
    model = mle_estimate(cut, nf)
    par = param_len_free(cut, sample.total)
    dat = data_len(model, sample, thesaurus)
    return LengthReport(mod_len, par, dat, par + dat, mod_len + par + dat)


def describe(cut, sample, thesaurus):
    """All description lengths of the MLE model on cut. l_prime uses the free-parameter L_par."""
    nf = assign_frequencies(sample, thesaurus)
    return _describe(cut, sample, nf, thesaurus, model_len(thesaurus))


def length_table(thesaurus, sample, limit=DEFAULT_ENUM_LIMIT):
    """
    (cut, LengthReport) for every cut of the tree, in enumeration order.

    Raises:
        EnumerationLimitError: the tree has more than limit cuts.
    """
    cuts = enumerate_cuts(thesaurus.root, limit)
    nf = assign_frequencies(sample, thesaurus)
    mod_len = model_len(thesaurus)
    return [(cut, _describe(cut, sample, nf, thesaurus, mod_len)) for cut in cuts]


def mdl_length(cut, nf, thesaurus, sample_total):
    """L' as minimized by Find-MDL: class-level L_dat plus the nodes-count L_par."""
    return class_data_len(cut, nf, thesaurus) + param_len_nodes(cut, sample_total)


def find_mdl(node, nf, sample_total):
    """
    Cut of the subtree rooted at node minimizing L' (nodes-count L_par).

    A node is collapsed into a single class only if that is strictly shorter than the
    concatenation of its children's optimal cuts; ties keep the finer cut. Runs in one
    postorder pass, with per-node class sizes and frequencies.

    Raises:
        EmptySampleError: nf.total is 0.
        ValueError: sample_total < 1.
    """
    if nf.total <= 0:
        raise EmptySampleError("cannot select a model for a sample with zero total frequency")
    _check_sample_total(sample_total)
    half_log = math.log2(sample_total) / 2.0
    total = nf.total

    units = {}
    best = {}
    collapse = set()
    for n in node.iter_postorder():
        u = len(n.members)
        children_len = 0.0
        for c in n.children:
            u += units.pop(c.id)
            children_len += best.pop(c.id)
        units[n.id] = u
        own_len = half_log + _class_term(nf.by_node.get(n.id, 0.0), u, total)
        if n.is_leaf:
            best[n.id] = own_len
            continue
        if nf.direct.get(n.id, 0.0) > 0:
            children_len = math.inf
        if own_len < children_len:
            collapse.add(n.id)
            best[n.id] = own_len
        else:
            best[n.id] = children_len

    nodes = []
    stack = [node]
    while stack:
        n = stack.pop()
        if n.is_leaf or n.id in collapse:
            nodes.append(n.id)
        else:
            stack.extend(reversed(n.children))
    logger.debug("Find-MDL selected %d classes under %s (L'=%.4f)", len(nodes), node.label, best[node.id])
    return Cut(tuple(nodes))


def find_mdl_brute(thesaurus, sample, limit=DEFAULT_ENUM_LIMIT):
    """
    Exhaustive minimum of L' over every cut. Ties go to the cut with more nodes, then to
    the earliest cut in enumeration order.

    Raises:
        EnumerationLimitError: the tree has more than limit cuts.
        EmptySampleError: no frequency mass lands on the tree.
    """
    nf = assign_frequencies(sample, thesaurus)
    if nf.total <= 0:
        raise EmptySampleError("cannot select a model for a sample with zero total frequency")
    cuts = enumerate_cuts(thesaurus.root, limit)
    scored = [(mdl_length(cut, nf, thesaurus, sample.total), -len(cut.nodes), idx) for idx, cut in enumerate(cuts)]
    return cuts[min(scored)[2]]


def find_mdl_model(thesaurus, sample):
    """Counting, Find-MDL and MLE for one SlotSample. Returns (TreeCutModel, NodeFrequencies)."""
    nf = assign_frequencies(sample, thesaurus)
    if nf.total <= 0:
        raise EmptySampleError("no frequency data for %s/%s" % (sample.head, sample.slot))
    cut = find_mdl(thesaurus.root, nf, sample.total)
    return mle_estimate(cut, nf), nf


def generalize(head, slot, triples, thesaurus, threshold=DEFAULT_THRESHOLD, example_words=DEFAULT_EXAMPLE_WORDS):
    """
    Generalize the values of (head, slot) to thesaurus classes.

    Keeps cut classes with probability >= threshold, sorted by descending probability
    (ties in left-to-right order). Each entry lists up to example_words observed words of
    the class, most frequent first.

    Raises:
        EmptySampleError: no data for (head, slot).
        ValueError: threshold outside [0, 1].
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1], got %r" % threshold)
    sample = slot_sample(triples, head, slot)
    if sample.total <= 0:
        raise EmptySampleError("no triples for head %r slot %r" % (head, slot))
    model, _ = find_mdl_model(thesaurus, sample)

    owner = cut_assignment(model.cut, thesaurus)
    examples = {node_id: {} for node_id in model.cut.nodes}
    for word, f in sample.freq.items():
        for node_id in thesaurus.word_index.get(word, ()):
            if node_id in owner:
                bucket = examples[owner[node_id]]
                bucket[word] = bucket.get(word, 0.0) + f

    entries = []
    for pos, (node_id, p) in enumerate(zip(model.cut.nodes, model.params)):
        if p < threshold:
            continue
        words = sorted(examples[node_id].items(), key=lambda kv: -kv[1])
        entries.append((p, pos, GeneralizationEntry(
            thesaurus.label(node_id), p, tuple(w for w, _ in words[:example_words]), node_id)))
    entries.sort(key=lambda e: (-e[0], e[1]))
    return GeneralizationResult(head, slot, [e[2] for e in entries], threshold, model.cut)
