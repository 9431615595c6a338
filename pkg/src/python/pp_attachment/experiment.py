"""
Learning curves: retrain on growing random subsets of the training triples and track how
coverage and accuracy of each strategy change with the amount of data.
"""
import logging
from collections import namedtuple

import numpy as np

from pp_attachment.disambig import STRATEGIES, Disambiguator, run_strategy
from tree_cut.assoc import DEFAULT_T_THRESHOLD
from tree_cut.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_FRACTIONS = (0.5, 0.6, 0.7, 0.8, 0.9)
DEFAULT_TRIALS = 10

# coverage / accuracy: means over trials, in percent
CurvePoint = namedtuple("CurvePoint", ["fraction", "strategy", "coverage", "accuracy"])


def _check(fractions, trials, strategies):
    if trials < 1:
        raise ConfigError("trials must be at least 1, got %r" % trials)
    for f in fractions:
        if not 0.0 < f <= 1.0:
            raise ConfigError("training fractions must be in (0, 1], got %r" % f)
    for name in strategies:
        if name not in STRATEGIES:
            raise KeyError("unknown strategy %r (expected one of %s)" % (name, ", ".join(STRATEGIES)))


def learning_curve(train, test, thesaurus, fractions=DEFAULT_FRACTIONS, trials=DEFAULT_TRIALS, seed=0,
                   strategies=("mdl", "sa"), t_threshold=DEFAULT_T_THRESHOLD, prune="global", marginal="slot"):
    """
    Mean coverage and accuracy per (fraction, strategy).

    For every fraction, trials subsets of round(fraction * len(train)) triples are drawn
    without replacement from one seeded generator; each subset trains a fresh
    Disambiguator that every strategy is evaluated with. Rows come out ordered by the
    given fractions, then strategies.

    Raises:
        ConfigError: fraction outside (0, 1] or trials < 1.
        KeyError: unknown strategy name.
    """
    _check(fractions, trials, strategies)
    train = list(train)
    rng = np.random.default_rng(seed)
    points = []
    for fraction in fractions:
        size = int(round(fraction * len(train)))
        coverage = {name: [] for name in strategies}
        accuracy = {name: [] for name in strategies}
        for trial in range(trials):
            idx = np.sort(rng.choice(len(train), size=size, replace=False))
            disambiguator = Disambiguator(thesaurus, [train[i] for i in idx], t_threshold, prune, marginal)
            for name in strategies:
                _, report = run_strategy(test, disambiguator, name)
                coverage[name].append(report.coverage)
                accuracy[name].append(report.accuracy)
        for name in strategies:
            points.append(CurvePoint(fraction, name, float(np.mean(coverage[name])), float(np.mean(accuracy[name]))))
        logger.info("Learning curve: fraction %.2f done (%d triples x %d trials)", fraction, size, trials)
    return points
