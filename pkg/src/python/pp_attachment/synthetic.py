"""
Seeded synthetic PP-attachment corpora drawn from planted tree cut distributions, and
random thesauri for tests and timing runs.

Each (head, prep) pair gets a planted model: a random cut of the thesaurus with Dirichlet
class probabilities, spread uniformly over the words of each class. An instance picks a
verb, a noun1 and a preposition, draws the attachment site, then draws noun2 from the
planted model of the chosen head. Every call owns its generator; nothing is shared.
"""
import logging
import os
from collections import namedtuple

import numpy as np

from pp_attachment.disambig import NOUN, VERB, PPInstance, format_pp_instances
from tree_cut.cooccur import Triple, format_triples, noun_head, verb_head
from tree_cut.errors import ConfigError
from tree_cut.thesaurus import Cut, Thesaurus, ThesaurusNode, format_thesaurus
from tree_cut.treecut import TreeCutModel, word_distribution

logger = logging.getLogger(__name__)

SynthSpec = namedtuple(
    "SynthSpec",
    ["branching", "depth", "n_verbs", "n_nouns", "preps", "n_train", "n_test",
     "verb_attach", "collapse", "concentration", "unseen_noun_rate", "seed"],
    defaults=[3, 3, 4, 8, ("with", "on"), 2000, 200, 0.5, 0.5, 0.3, 0.2, 0],
)

SYNTH_FILES = ("thesaurus.txt", "train.tsv", "test.tsv")


def complete_thesaurus(branching, depth):
    """Complete tree with the given branching and depth; leaves are words w0, w1, ..."""
    counter = {"word": 0}

    def build(level):
        if level == depth:
            word = "w%d" % counter["word"]
            counter["word"] += 1
            return ThesaurusNode(None, word, [word])
        return (None, [build(level + 1) for _ in range(branching)])

    return _assign_ids(build(0))


def random_thesaurus(rng, n_leaves, max_children=4):
    """
    Random tree with exactly n_leaves leaves; each internal node has 2..max_children
    children. Leaves are words w0, w1, ... in left-to-right order.
    """
    if n_leaves < 1:
        raise ValueError("n_leaves must be positive")
    counter = {"word": 0}

    def build(k):
        # explicit stack; random trees with thousands of leaves can be deep
        root = [k, None, []]
        stack = [root]
        while stack:
            item = stack.pop()
            k = item[0]
            if k == 1:
                continue
            m = int(rng.integers(2, min(max_children, k) + 1))
            cuts = np.sort(rng.choice(np.arange(1, k), size=m - 1, replace=False))
            sizes = np.diff(np.concatenate(([0], cuts, [k])))
            item[2] = [[int(s), None, []] for s in sizes]
            stack.extend(reversed(item[2]))
        return root

    def to_nodes(item):
        nodes = {}
        stack = [(item, False)]
        while stack:
            it, expanded = stack.pop()
            if not it[2]:
                word = "w%d" % counter["word"]
                counter["word"] += 1
                nodes[id(it)] = ThesaurusNode(None, word, [word])
            elif expanded:
                nodes[id(it)] = (None, [nodes.pop(id(c)) for c in it[2]])
            else:
                stack.append((it, True))
                stack.extend((c, False) for c in reversed(it[2]))
        return nodes[id(item)]

    return _assign_ids(to_nodes(build(n_leaves)))


def _assign_ids(raw):
    """
    Turn a nested (label, children) / ThesaurusNode structure into a Thesaurus with
    preorder ids n0, n1, ... (what parse_thesaurus would synthesize).
    """
    order = []
    stack = [raw]
    while stack:
        item = stack.pop()
        order.append(item)
        if isinstance(item, tuple):
            stack.extend(reversed(item[1]))
    ids = {id(item): "n%d" % idx for idx, item in enumerate(order)}

    labels = {}
    for item in order:
        if isinstance(item, tuple):
            labels[id(item)] = item[0] if item[0] is not None else "C%d" % len(labels)

    built = {}
    for item in reversed(order):
        if isinstance(item, ThesaurusNode):
            built[id(item)] = ThesaurusNode(ids[id(item)], item.label, item.members)
        else:
            built[id(item)] = ThesaurusNode(ids[id(item)], labels[id(item)], (), [built[id(c)] for c in item[1]])
    return Thesaurus(built[id(raw)])


def plant_model(rng, thesaurus, collapse, concentration):
    """
    Random tree cut model: descend from the root, stopping at each non-root internal
    node with probability collapse; class probabilities ~ Dirichlet(concentration).
    """
    nodes = []
    stack = [(thesaurus.root, True)]
    while stack:
        node, is_root = stack.pop()
        if node.is_leaf or (not is_root and rng.random() < collapse):
            nodes.append(node.id)
        else:
            stack.extend((c, False) for c in reversed(node.children))
    params = rng.dirichlet(np.full(len(nodes), concentration))
    return TreeCutModel(Cut(tuple(nodes)), tuple(float(p) for p in params), 0.0)


def validate_spec(spec):
    if spec.branching < 2 or spec.depth < 1:
        raise ConfigError("synthetic tree needs branching >= 2 and depth >= 1")
    if spec.n_verbs < 1 or spec.n_nouns < 1 or not spec.preps:
        raise ConfigError("synthetic corpus needs at least one verb, one noun and one preposition")
    if spec.n_nouns > spec.branching ** spec.depth:
        raise ConfigError("n_nouns (%d) exceeds the number of thesaurus words (%d)"
                          % (spec.n_nouns, spec.branching ** spec.depth))
    if spec.n_train < 0 or spec.n_test < 0:
        raise ConfigError("sample sizes must be nonnegative")
    for name in ("verb_attach", "collapse", "unseen_noun_rate"):
        value = getattr(spec, name)
        if not 0.0 <= value <= 1.0:
            raise ConfigError("%s must be in [0, 1], got %r" % (name, value))
    if spec.concentration <= 0:
        raise ConfigError("concentration must be positive")


def generate_synthetic(spec):
    """
    Draw a training corpus and a test set from planted distributions.

    Returns (thesaurus, training triples, test PPInstances); identical for identical specs.

    Raises:
        ConfigError: invalid spec.
    """
    validate_spec(spec)
    rng = np.random.default_rng(spec.seed)
    thesaurus = complete_thesaurus(spec.branching, spec.depth)
    words = thesaurus.words()
    verbs = ["v%d" % i for i in range(spec.n_verbs)]
    picked = set(rng.choice(len(words), size=spec.n_nouns, replace=False).tolist())
    nouns = [w for i, w in enumerate(words) if i in picked]
    unseen = [w for i, w in enumerate(words) if i not in picked]
    preps = list(spec.preps)

    planted = {}

    def value_dist(head, prep):
        key = (head, prep)
        if key not in planted:
            model = plant_model(rng, thesaurus, spec.collapse, spec.concentration)
            dist = word_distribution(model, thesaurus)
            probs = np.array([dist.get(w, 0.0) for w in words])
            planted[key] = probs / probs.sum()
        return planted[key]

    def draw(noun_pool):
        verb = verbs[int(rng.integers(len(verbs)))]
        noun1 = noun_pool[int(rng.integers(len(noun_pool)))]
        prep = preps[int(rng.integers(len(preps)))]
        site = VERB if rng.random() < spec.verb_attach else NOUN
        head = verb_head(verb) if site == VERB else noun_head(noun1)
        noun2 = words[int(rng.choice(len(words), p=value_dist(head, prep)))]
        return PPInstance(verb, noun1, prep, noun2, site)

    train = []
    for _ in range(spec.n_train):
        q = draw(nouns)
        head = verb_head(q.verb) if q.gold == VERB else noun_head(q.noun1)
        train.append(Triple(head, q.prep, q.noun2, 1.0))

    test = []
    for _ in range(spec.n_test):
        pool = unseen if unseen and rng.random() < spec.unseen_noun_rate else nouns
        test.append(draw(pool))

    logger.info("Synthetic corpus: %d training triples, %d test instances, %d planted models (seed %d)",
                len(train), len(test), len(planted), spec.seed)
    return thesaurus, train, test


def write_synthetic(out_dir, thesaurus, train, test):
    """Write thesaurus.txt, train.tsv and test.tsv under out_dir. Returns the three paths."""
    os.makedirs(out_dir, exist_ok=True)
    contents = (format_thesaurus(thesaurus), format_triples(train), format_pp_instances(test))
    paths = []
    for name, text in zip(SYNTH_FILES, contents):
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        paths.append(path)
    return paths
