"""
PP-attachment disambiguation over trained slot models.

Given (verb, noun1, prep, noun2), each strategy says whether (prep, noun2) attaches to the
verb or to noun1, or declines to decide:

    default    always noun1
    la         lexical association P(prep|verb) vs P(prep|noun1), t-score gated
    sa         argmax selectional association of noun2's classes, t-score gated
    mdl        P(noun2|verb, prep) vs P(noun2|noun1, prep) under Find-MDL tree cut models
    mdl2       as mdl, with noun heads also pooled at their thesaurus classes
    combined   mdl, then la, then default
    combined2  mdl2, then la, then default

PP test file: TSV ``verb<TAB>noun1<TAB>prep<TAB>noun2<TAB>gold`` with gold ``v`` or ``n``.
Training triples carry ``verb:`` / ``noun:`` tagged heads and use the preposition as slot.
"""
import logging
import math
from collections import namedtuple

from tree_cut.assoc import (
    DEFAULT_T_THRESHOLD,
    CooccurrenceTable,
    lexical_association,
    sa_generalize,
    t_score,
)
from tree_cut.cooccur import SlotSample, noun_head, split_head, verb_head
from tree_cut.errors import EmptySampleError, TriplesFormatError
from tree_cut.thesaurus import prune_observed_subtrees
from tree_cut.treecut import find_mdl_model, word_distribution

logger = logging.getLogger(__name__)

VERB = "verb"
NOUN = "noun"
UNDECIDED = "undecided"
UNKNOWN = "unknown"

GOLD_CODES = {"v": VERB, "n": NOUN, "?": UNKNOWN}
PRUNE_POLICIES = ("global", "per_slot", "none")

CHAINS = {
    "combined": ("mdl", "la", "default"),
    "combined2": ("mdl2", "la", "default"),
}
STRATEGIES = ("default", "la", "sa", "mdl", "mdl2") + tuple(CHAINS)

PPInstance = namedtuple("PPInstance", ["verb", "noun1", "prep", "noun2", "gold"], defaults=[UNKNOWN])
# evidence: (verb-side score, noun-side score)
Decision = namedtuple("Decision", ["verdict", "strategy", "evidence"])
EvalReport = namedtuple("EvalReport", ["n_total", "n_decided", "n_correct", "coverage", "accuracy"])

# A trained model together with the thesaurus it was trained on and its word probabilities
SlotModel = namedtuple("SlotModel", ["model", "thesaurus", "word_probs"])
MDL2Models = namedtuple("MDL2Models", ["by_head", "by_class"])


def parse_pp_instances(text):
    """
    Parse a PP test file. A missing gold column means gold is unknown.

    Raises:
        TriplesFormatError: wrong column count or unknown gold label.
    """
    instances = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = [c.strip() for c in line.split("\t")]
        if len(cols) not in (4, 5):
            raise TriplesFormatError("expected 4 or 5 tab-separated columns, got %d" % len(cols), lineno)
        if not all(cols[:4]):
            raise TriplesFormatError("empty word", lineno)
        gold = UNKNOWN
        if len(cols) == 5:
            gold = GOLD_CODES.get(cols[4].lower())
            if gold is None:
                raise TriplesFormatError("gold label must be v or n, got %r" % cols[4], lineno)
        instances.append(PPInstance(cols[0], cols[1], cols[2], cols[3], gold))
    return instances


def load_pp_instances(path):
    with open(path, encoding="utf-8") as f:
        return parse_pp_instances(f.read())


def format_pp_instances(instances):
    codes = {v: k for k, v in GOLD_CODES.items()}
    lines = ["# verb\tnoun1\tprep\tnoun2\tgold"]
    for q in instances:
        lines.append("\t".join((q.verb, q.noun1, q.prep, q.noun2, codes[q.gold])))
    return "\n".join(lines) + "\n"


def _train(sample, thesaurus):
    try:
        model, _ = find_mdl_model(thesaurus, sample)
    except (EmptySampleError, ValueError) as e:
        logger.debug("No model for %s/%s: %s", sample.head, sample.slot, e)
        return None
    return SlotModel(model, thesaurus, word_distribution(model, thesaurus))


def _samples_by_pair(triples):
    pairs = {}
    for t in triples:
        freq = pairs.setdefault((t.head, t.slot), {})
        freq[t.value] = freq.get(t.value, 0.0) + t.count
    return {key: SlotSample(key[0], key[1], freq, math.fsum(freq.values())) for key, freq in pairs.items()}


def _train_samples(samples, thesaurus, prune, observed=None):
    if prune not in PRUNE_POLICIES:
        raise ValueError("unknown prune policy %r (expected one of %s)" % (prune, ", ".join(PRUNE_POLICIES)))
    if prune == "global":
        if observed is None:
            observed = set()
            for s in samples.values():
                observed.update(s.freq)
        thesaurus = prune_observed_subtrees(thesaurus, observed)
    models = {}
    for key, sample in samples.items():
        tree = prune_observed_subtrees(thesaurus, sample.freq) if prune == "per_slot" else thesaurus
        trained = _train(sample, tree)
        if trained is not None:
            models[key] = trained
    return models


def train_mdl_models(triples, thesaurus, prune="global"):
    """One Find-MDL tree cut model per observed (head, slot) pair."""
    models = _train_samples(_samples_by_pair(triples), thesaurus, prune)
    logger.info("Trained %d tree cut models", len(models))
    return models


def train_mdl2_models(triples, thesaurus, prune="global"):
    """
    Models for MDL2: the per-head models, plus, for noun heads, models trained on counts
    pooled at every thesaurus class above the head (its own nodes included).
    """
    by_head = train_mdl_models(triples, thesaurus, prune)
    pooled = {}
    for t in triples:
        tag, word = split_head(t.head)
        if tag != NOUN or word not in thesaurus:
            continue
        classes = {}
        for node_id in thesaurus.word_index[word]:
            for anc in thesaurus.ancestors(node_id):
                classes.setdefault(anc, None)
        for class_id in classes:
            freq = pooled.setdefault((class_id, t.slot), {})
            freq[t.value] = freq.get(t.value, 0.0) + t.count
    samples = {key: SlotSample(key[0], key[1], freq, math.fsum(freq.values())) for key, freq in pooled.items()}
    by_class = _train_samples(samples, thesaurus, prune, observed={t.value for t in triples})
    logger.info("Trained %d class-pooled head models", len(by_class))
    return MDL2Models(by_head, by_class)


def mdl2_lookup(models, noun1, prep, thesaurus):
    """Model for noun1: its own if trained, else the one at its most specific pooled class."""
    own = models.by_head.get((noun_head(noun1), prep))
    if own is not None or noun1 not in thesaurus:
        return own
    candidates = {}
    for node_id in thesaurus.word_index[noun1]:
        for anc in thesaurus.ancestors(node_id):
            candidates.setdefault(anc, None)
    for class_id in sorted(candidates, key=lambda n: (-thesaurus.depth[n], thesaurus.order[n])):
        model = models.by_class.get((class_id, prep))
        if model is not None:
            return model
    return None


def slot_prob(slot_model, word):
    """P(word) under a trained slot model; 0 for a missing model or an uncovered word."""
    if slot_model is None:
        return 0.0
    return slot_model.word_probs.get(word, 0.0)


def _compare(p_verb, p_noun, strategy):
    if p_verb > p_noun:
        verdict = VERB
    elif p_noun > p_verb:
        verdict = NOUN
    else:
        verdict = UNDECIDED
    return Decision(verdict, strategy, (p_verb, p_noun))


def decide_mdl(q, models):
    """Attach to the side giving noun2 the higher smoothed probability; undecided on ties (e.g. both 0)."""
    p_verb = slot_prob(models.get((verb_head(q.verb), q.prep)), q.noun2)
    p_noun = slot_prob(models.get((noun_head(q.noun1), q.prep)), q.noun2)
    return _compare(p_verb, p_noun, "mdl")


def decide_mdl2(q, models, thesaurus):
    p_verb = slot_prob(models.by_head.get((verb_head(q.verb), q.prep)), q.noun2)
    p_noun = slot_prob(mdl2_lookup(models, q.noun1, q.prep, thesaurus), q.noun2)
    return _compare(p_verb, p_noun, "mdl2")


def _gated(t, score_verb, score_noun, t_threshold, strategy):
    if abs(t) >= t_threshold:
        if score_verb > score_noun:
            return Decision(VERB, strategy, (score_verb, score_noun))
        if score_noun > score_verb:
            return Decision(NOUN, strategy, (score_verb, score_noun))
    return Decision(UNDECIDED, strategy, (score_verb, score_noun))


def decide_sa(q, table, thesaurus, t_threshold=DEFAULT_T_THRESHOLD, marginal="slot"):
    """
    Compare the maximal selectional association of noun2's classes for the verb and for
    noun1; decide only if the t-score of the winning classes' proportions is significant.
    """
    if q.noun2 not in thesaurus:
        return Decision(UNDECIDED, "sa", (0.0, 0.0))
    sv = sa_generalize(q.noun2, verb_head(q.verb), q.prep, table, thesaurus, marginal=marginal)
    sn = sa_generalize(q.noun2, noun_head(q.noun1), q.prep, table, thesaurus, marginal=marginal)
    t = t_score(sv.probability, sv.support, sn.probability, sn.support)
    return _gated(t, sv.score, sn.score, t_threshold, "sa")


def decide_la(q, table, t_threshold=DEFAULT_T_THRESHOLD):
    """Compare P(prep|verb) with P(prep|noun1); decide only on a significant t-score."""
    p_verb, n_verb = lexical_association(q.prep, verb_head(q.verb), table)
    p_noun, n_noun = lexical_association(q.prep, noun_head(q.noun1), table)
    t = t_score(p_verb, n_verb, p_noun, n_noun)
    return _gated(t, p_verb, p_noun, t_threshold, "la")


def decide_default(q):
    return Decision(NOUN, "default", (0.0, 0.0))


def decide_chain(q, strategies):
    """
    First decided verdict among strategies (callables q -> Decision), labeled by the
    strategy that made it. If none decides, the last strategy's undecided Decision.
    """
    if not strategies:
        raise ValueError("strategy chain must not be empty")
    decision = None
    for strategy in strategies:
        decision = strategy(q)
        if decision.verdict != UNDECIDED:
            return decision
    return decision


def evaluate(decisions, gold):
    """
    Coverage and accuracy in percent; undecided items count against coverage only.

    Raises:
        ValueError: decisions and gold differ in length.
    """
    if len(decisions) != len(gold):
        raise ValueError("got %d decisions for %d gold labels" % (len(decisions), len(gold)))
    n_total = len(decisions)
    n_decided = sum(1 for d in decisions if d.verdict != UNDECIDED)
    n_correct = sum(1 for d, g in zip(decisions, gold) if d.verdict != UNDECIDED and d.verdict == g)
    coverage = 100.0 * n_decided / n_total if n_total else 0.0
    accuracy = 100.0 * n_correct / n_decided if n_decided else 0.0
    return EvalReport(n_total, n_decided, n_correct, coverage, accuracy)


class Disambiguator:
    """
    Trained resources for every strategy: count tables, tree cut models and the
    class-pooled MDL2 models. Models are trained on first use and then only read.
    """

    def __init__(self, thesaurus, triples, t_threshold=DEFAULT_T_THRESHOLD, prune="global", marginal="slot"):
        self.thesaurus = thesaurus
        self.triples = list(triples)
        self.t_threshold = t_threshold
        self.prune = prune
        self.marginal = marginal
        self.table = CooccurrenceTable.from_triples(self.triples)
        self._mdl = None
        self._mdl2 = None

    @property
    def mdl_models(self):
        if self._mdl is None:
            self._mdl = train_mdl_models(self.triples, self.thesaurus, self.prune)
        return self._mdl

    @property
    def mdl2_models(self):
        if self._mdl2 is None:
            self._mdl2 = train_mdl2_models(self.triples, self.thesaurus, self.prune)
            self._mdl = self._mdl2.by_head
        return self._mdl2

    def strategy(self, name):
        """Callable q -> Decision for a strategy name."""
        if name in CHAINS:
            steps = [self.strategy(step) for step in CHAINS[name]]
            return lambda q: decide_chain(q, steps)
        if name == "default":
            return decide_default
        if name == "la":
            return lambda q: decide_la(q, self.table, self.t_threshold)
        if name == "sa":
            return lambda q: decide_sa(q, self.table, self.thesaurus, self.t_threshold, self.marginal)
        if name == "mdl":
            return lambda q: decide_mdl(q, self.mdl_models)
        if name == "mdl2":
            return lambda q: decide_mdl2(q, self.mdl2_models, self.thesaurus)
        raise KeyError("unknown strategy %r (expected one of %s)" % (name, ", ".join(STRATEGIES)))

    def decide(self, q, name):
        return self.strategy(name)(q)


def run_strategy(instances, disambiguator, name):
    """Decide every instance with one strategy. Returns (decisions, EvalReport)."""
    decide = disambiguator.strategy(name)
    decisions = [decide(q) for q in instances]
    report = evaluate(decisions, [q.gold for q in instances])
    logger.info("%s: coverage %.1f%% accuracy %.1f%% (%d/%d decided)",
                name, report.coverage, report.accuracy, report.n_decided, report.n_total)
    return decisions, report
