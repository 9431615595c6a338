#!/usr/bin/env python3
"""
Property tests for Find-MDL and tree cut estimation on random trees (up to 12 leaves)
and random samples, with exhaustive cut enumeration as the oracle.
"""
import math
import os
import unittest

# Add src/python to path
import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src", "python"))

import numpy as np
from hypothesis import given, settings, strategies as st

from pp_attachment.synthetic import random_thesaurus
from tree_cut.cooccur import SlotSample, Triple, assign_frequencies, slot_sample
from tree_cut.thesaurus import Cut, enumerate_cuts, is_valid_cut
from tree_cut.treecut import (
    TreeCutModel,
    class_data_len,
    data_len,
    find_mdl,
    find_mdl_brute,
    mdl_length,
    mle_estimate,
    param_len_free,
    param_len_nodes,
    word_distribution,
    word_prob,
)

MAX_LEAVES = 12
TOLERANCE = 1e-9

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def random_instance(seed):
    """(thesaurus, sample, node frequencies) drawn from one seed."""
    rng = np.random.default_rng(seed)
    t = random_thesaurus(rng, int(rng.integers(1, MAX_LEAVES + 1)))
    words = t.words()
    k = int(rng.integers(1, len(words) + 1))
    chosen = rng.choice(len(words), size=k, replace=False)
    freq = {words[i]: float(rng.integers(1, 6)) for i in chosen}
    sample = SlotSample("h", "s", freq, math.fsum(freq.values()))
    return t, sample, assign_frequencies(sample, t)


class TestFindMdlOptimality(unittest.TestCase):
    """Find-MDL reaches the enumerated minimum of L'."""

    @settings(max_examples=500, deadline=None)
    @given(seed=seeds)
    def test_matches_brute_force(self, seed):
        t, sample, nf = random_instance(seed)
        cut = find_mdl(t.root, nf, sample.total)
        self.assertTrue(is_valid_cut(cut, t))
        oracle = find_mdl_brute(t, sample)
        self.assertAlmostEqual(mdl_length(cut, nf, t, sample.total),
                               mdl_length(oracle, nf, t, sample.total), delta=TOLERANCE)

    @settings(max_examples=200, deadline=None)
    @given(seed=seeds)
    def test_never_beaten_by_any_cut(self, seed):
        t, sample, nf = random_instance(seed)
        best = mdl_length(find_mdl(t.root, nf, sample.total), nf, t, sample.total)
        for cut in enumerate_cuts(t.root, 10 ** 5):
            self.assertLessEqual(best, mdl_length(cut, nf, t, sample.total) + TOLERANCE)

    @settings(max_examples=200, deadline=None)
    @given(seed=seeds)
    def test_optimal_cut_is_built_from_optimal_subtree_cuts(self, seed):
        t, sample, nf = random_instance(seed)
        cut = find_mdl(t.root, nf, sample.total)
        if cut == Cut((t.root.id,)):
            return
        parts = []
        for child in t.root.children:
            parts.extend(find_mdl(child, nf, sample.total).nodes)
        self.assertEqual(cut, Cut(tuple(parts)))


class TestLengthIdentities(unittest.TestCase):
    """Additivity of the data length and the offset between parameter length conventions."""

    @settings(max_examples=500, deadline=None)
    @given(seed=seeds)
    def test_data_length_is_additive_over_subtrees(self, seed):
        t, sample, nf = random_instance(seed)
        for cut in enumerate_cuts(t.root, 10 ** 5):
            if cut == Cut((t.root.id,)):
                continue
            by_child = {}
            for node_id in cut.nodes:
                top = t.ancestors(node_id)[-2]
                by_child.setdefault(top, []).append(node_id)
            parts = [class_data_len(Cut(tuple(ids)), nf, t) for ids in by_child.values()]
            self.assertAlmostEqual(class_data_len(cut, nf, t), math.fsum(parts), delta=TOLERANCE)

    @settings(max_examples=500, deadline=None)
    @given(seed=seeds)
    def test_parameter_length_offset(self, seed):
        t, sample, nf = random_instance(seed)
        cut = find_mdl(t.root, nf, sample.total)
        offset = param_len_nodes(cut, sample.total) - param_len_free(cut, sample.total)
        self.assertAlmostEqual(offset, math.log2(sample.total) / 2, delta=TOLERANCE)

    @settings(max_examples=300, deadline=None)
    @given(seed=seeds)
    def test_both_parameter_conventions_select_the_same_cuts(self, seed):
        t, sample, nf = random_instance(seed)
        data = {cut: class_data_len(cut, nf, t) for cut in enumerate_cuts(t.root, 10 ** 5)}

        def minimal(param_len):
            lengths = {cut: d + param_len(cut, sample.total) for cut, d in data.items()}
            best = min(lengths.values())
            return {cut for cut, length in lengths.items() if length <= best + TOLERANCE}

        self.assertEqual(minimal(param_len_free), minimal(param_len_nodes))

    @settings(max_examples=300, deadline=None)
    @given(seed=seeds)
    def test_all_leaves_cut_has_the_shortest_data_length(self, seed):
        t, sample, nf = random_instance(seed)
        leaves = Cut(tuple(leaf.id for leaf in t.leaves()))
        shortest = data_len(mle_estimate(leaves, nf), sample, t)
        for cut in enumerate_cuts(t.root, 10 ** 5):
            self.assertLessEqual(shortest, data_len(mle_estimate(cut, nf), sample, t) + TOLERANCE)

    @settings(max_examples=300, deadline=None)
    @given(seed=seeds)
    def test_class_and_word_level_data_lengths_agree(self, seed):
        t, sample, nf = random_instance(seed)
        cut = find_mdl(t.root, nf, sample.total)
        model = mle_estimate(cut, nf)
        self.assertAlmostEqual(class_data_len(cut, nf, t), data_len(model, sample, t), delta=TOLERANCE)


class TestCounting(unittest.TestCase):
    """Frequency bookkeeping from triples to thesaurus nodes."""

    @settings(max_examples=300, deadline=None)
    @given(seed=seeds, extra=st.lists(st.floats(min_value=0.1, max_value=50.0), max_size=4))
    def test_mass_is_kept_or_reported_as_dropped(self, seed, extra):
        t, sample, _ = random_instance(seed)
        freq = dict(sample.freq)
        for i, f in enumerate(extra):
            freq["unknown%d" % i] = f
        sample = SlotSample("h", "s", freq, math.fsum(freq.values()))
        nf = assign_frequencies(sample, t)
        self.assertAlmostEqual(nf.total + nf.dropped, sample.total, delta=TOLERANCE * max(1.0, sample.total))
        self.assertAlmostEqual(nf.dropped, math.fsum(extra), delta=TOLERANCE * max(1.0, sample.total))

    @settings(max_examples=300, deadline=None)
    @given(counts=st.lists(st.tuples(st.sampled_from(["a", "b", "c"]), st.sampled_from(["s", "o"]),
                                     st.floats(min_value=0.01, max_value=100.0)), max_size=20),
           data=st.data())
    def test_slot_sample_ignores_triple_order(self, counts, data):
        triples = [Triple("h", slot, value, f) for value, slot, f in counts]
        shuffled = data.draw(st.permutations(triples))
        for slot in ("s", "o"):
            self.assertEqual(slot_sample(triples, "h", slot), slot_sample(shuffled, "h", slot))

    def test_fractional_counts_sum_exactly(self):
        triples = [Triple("h", "s", "x", f) for f in (0.1, 0.2, 0.3)]
        self.assertEqual(slot_sample(triples, "h", "s").freq, {"x": 0.6})
        self.assertEqual(slot_sample(triples[::-1], "h", "s").freq, {"x": 0.6})


class TestSmoothing(unittest.TestCase):
    """Smoothed probabilities of the selected model."""

    @settings(max_examples=500, deadline=None)
    @given(seed=seeds)
    def test_unseen_words_share_class_mass(self, seed):
        t, sample, nf = random_instance(seed)
        model = mle_estimate(find_mdl(t.root, nf, sample.total), nf)
        probs = dict(zip(model.cut.nodes, model.params))
        for node_id in model.cut.nodes:
            if probs[node_id] <= 0:
                continue
            for leaf in t.leaves(t.node(node_id)):
                for word in leaf.members:
                    self.assertGreater(word_prob(model, t, word), 0.0)

    @settings(max_examples=500, deadline=None)
    @given(seed=seeds)
    def test_word_probabilities_sum_to_one(self, seed):
        t, sample, nf = random_instance(seed)
        model = mle_estimate(find_mdl(t.root, nf, sample.total), nf)
        total = math.fsum(word_prob(model, t, w) for leaf in t.leaves() for w in leaf.members)
        self.assertAlmostEqual(total, 1.0, delta=TOLERANCE)
        self.assertAlmostEqual(math.fsum(word_distribution(model, t).values()), 1.0, delta=TOLERANCE)

    @settings(max_examples=200, deadline=None)
    @given(seed=seeds, eps=st.floats(min_value=0.01, max_value=0.99))
    def test_mle_maximizes_likelihood_on_its_cut(self, seed, eps):
        t, sample, nf = random_instance(seed)
        cut = find_mdl(t.root, nf, sample.total)
        model = mle_estimate(cut, nf)
        other = np.random.default_rng(seed).dirichlet(np.ones(len(cut.nodes)))
        params = tuple((1 - eps) * p + eps * float(q) for p, q in zip(model.params, other))
        perturbed = TreeCutModel(cut, params, model.sample_total)
        self.assertLessEqual(data_len(model, sample, t), data_len(perturbed, sample, t) + TOLERANCE)


if __name__ == "__main__":
    unittest.main()
