#!/usr/bin/env python3
"""
Tests for tree_cut.thesaurus.
"""
import os
import tempfile
import unittest

# Add src/python to path
import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src", "python"))

import numpy as np
from hypothesis import given, settings, strategies as st

from pp_attachment.synthetic import complete_thesaurus, random_thesaurus
from tree_cut.errors import EnumerationLimitError, ThesaurusFormatError
from tree_cut.thesaurus import (
    Cut,
    count_cuts,
    cut_labels,
    enumerate_cuts,
    format_thesaurus,
    is_valid_cut,
    load_thesaurus,
    parse_thesaurus,
    prune_observed_subtrees,
)

SAMPLES = os.path.join(os.path.dirname(__file__), "..", "samples", "fly_arg1")

ANIMAL = "ANIMAL\n\tBIRD\n\t\tswallow\n\t\tcrow\n\t\teagle\n\t\tbird\n\tINSECT\n\t\tbug\n\t\tbee\n\t\tinsect\n"

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def with_internal_members(seed):
    """Random tree (up to 12 leaves) where some internal nodes also carry a word c<i>."""
    rng = np.random.default_rng(seed)
    t = random_thesaurus(rng, int(rng.integers(1, 13)))
    lines = format_thesaurus(t).splitlines()
    for i, line in enumerate(lines[:-1]):
        depth = len(line) - len(line.lstrip("\t"))
        nxt = len(lines[i + 1]) - len(lines[i + 1].lstrip("\t"))
        if nxt > depth and rng.random() < 0.5:
            lines[i] = "%s: c%d" % (line, i)
    return parse_thesaurus("\n".join(lines) + "\n"), rng


class TestParseThesaurus(unittest.TestCase):
    """Tests for parse_thesaurus and the Thesaurus indices."""

    def setUp(self):
        self.t = parse_thesaurus(ANIMAL)

    def test_structure(self):
        self.assertEqual(len(self.t), 10)
        self.assertEqual(self.t.root.label, "ANIMAL")
        self.assertEqual([n.label for n in self.t.root.children], ["BIRD", "INSECT"])
        self.assertEqual(len(self.t.leaves()), 7)
        self.assertEqual(self.t.words(), ["swallow", "crow", "eagle", "bird", "bug", "bee", "insect"])

    def test_synthesized_ids_follow_preorder(self):
        self.assertEqual(self.t.root.id, "n0")
        self.assertEqual(self.t.label("n1"), "BIRD")
        self.assertEqual(self.t.label("n6"), "INSECT")
        self.assertEqual(self.t.word_index["bee"], ("n8",))

    def test_indices(self):
        self.assertEqual(self.t.units["n0"], 7)
        self.assertEqual(self.t.units["n1"], 4)
        self.assertEqual(self.t.units["n6"], 3)
        self.assertEqual(self.t.depth["n8"], 2)
        self.assertEqual(self.t.parent["n8"], "n6")
        self.assertIsNone(self.t.parent["n0"])
        self.assertEqual(self.t.ancestors("n8"), ["n8", "n6", "n0"])
        self.assertIn("eagle", self.t)
        self.assertNotIn("car", self.t)

    def test_explicit_ids_and_members(self):
        t = parse_thesaurus("VEHICLE@v\n\tcar@c: car, auto\n\t# comment\n\n\tbus\n")
        self.assertEqual(t.root.id, "v")
        self.assertEqual(t.node("c").members, ("car", "auto"))
        self.assertEqual(t.word_index["auto"], ("c",))
        self.assertEqual(t.units["v"], 3)

    def test_word_on_several_nodes(self):
        t = parse_thesaurus("ROOT\n\tA\n\t\tbank\n\t\tshore\n\tB\n\t\tbank@b2: bank\n")
        self.assertEqual(len(t.word_index["bank"]), 2)

    def test_internal_members(self):
        t = parse_thesaurus("ROOT\n\tFOOD: food\n\t\tpizza\n\t\tpasta\n")
        food = t.root.children[0]
        self.assertFalse(food.is_leaf)
        self.assertEqual(food.members, ("food",))
        self.assertEqual(t.units[food.id], 3)

    def test_nodes_are_immutable(self):
        with self.assertRaises(AttributeError):
            self.t.root.label = "X"

    def test_format_errors(self):
        cases = {
            "": None,
            "# only a comment\n": None,
            "ROOT\n\t A\n": 2,
            "ROOT\n\t\tA\n": 2,
            "\tROOT\n": 1,
            "A\nB\n": 2,
            "R\n\tA@x\n\tB@x\n": 3,
            "R\n\tA:\n": None,
        }
        for text, lineno in cases.items():
            with self.subTest(text=text):
                with self.assertRaises(ThesaurusFormatError) as ctx:
                    parse_thesaurus(text)
                if lineno is not None:
                    self.assertEqual(ctx.exception.lineno, lineno)

    def test_deep_chain(self):
        depth = 1500
        text = "".join("\t" * d + "C%d\n" % d for d in range(depth)) + "\t" * depth + "w\n"
        t = parse_thesaurus(text)
        self.assertEqual(len(t), depth + 1)
        self.assertEqual(t.depth[t.word_index["w"][0]], depth)
        self.assertEqual(count_cuts(t.root), depth + 1)
        self.assertEqual(format_thesaurus(t), text)

    def test_format_error_is_value_error(self):
        with self.assertRaises(ValueError):
            parse_thesaurus("")

    def test_load_sample_file(self):
        t = load_thesaurus(os.path.join(SAMPLES, "thesaurus.txt"))
        self.assertEqual(format_thesaurus(t), ANIMAL)

    def test_format_keeps_ids_and_members(self):
        text = "VEHICLE@v\n\tcar@c: car,auto\n\tbus\n"
        t = parse_thesaurus(text)
        self.assertEqual(format_thesaurus(t), text)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "t.txt")
            with open(path, "w", encoding="utf-8") as f:
                f.write(format_thesaurus(t))
            again = load_thesaurus(path)
        self.assertEqual(again.node("c").members, ("car", "auto"))


class TestCuts(unittest.TestCase):
    """Tests for count_cuts, enumerate_cuts and is_valid_cut."""

    def setUp(self):
        self.t = parse_thesaurus(ANIMAL)

    def test_count_cuts(self):
        self.assertEqual(count_cuts(self.t.root), 5)
        self.assertEqual(count_cuts(self.t.node("n1")), 2)
        self.assertEqual(count_cuts(self.t.node("n2")), 1)

    def test_count_cuts_is_exact(self):
        # c(d) = 1 + c(d-1)^2 for complete binary trees
        self.assertEqual(count_cuts(complete_thesaurus(2, 5).root), 458330)
        self.assertEqual(count_cuts(complete_thesaurus(2, 8).root) % 10, 5)

    def test_enumerate_cuts(self):
        cuts = enumerate_cuts(self.t.root, 100)
        labels = [cut_labels(c, self.t) for c in cuts]
        self.assertEqual(labels, [
            ["ANIMAL"],
            ["BIRD", "INSECT"],
            ["BIRD", "bug", "bee", "insect"],
            ["swallow", "crow", "eagle", "bird", "INSECT"],
            ["swallow", "crow", "eagle", "bird", "bug", "bee", "insect"],
        ])
        self.assertEqual(len(set(cuts)), 5)
        for cut in cuts:
            self.assertTrue(is_valid_cut(cut, self.t))

    def test_enumeration_limit(self):
        with self.assertRaises(EnumerationLimitError) as ctx:
            enumerate_cuts(self.t.root, 4)
        self.assertEqual(ctx.exception.count, 5)
        self.assertEqual(ctx.exception.limit, 4)

    def test_single_leaf_tree(self):
        t = parse_thesaurus("word\n")
        self.assertEqual(enumerate_cuts(t.root, 1), [Cut(("n0",))])

    def test_invalid_cuts(self):
        self.assertFalse(is_valid_cut(Cut(("n1",)), self.t))
        self.assertFalse(is_valid_cut(Cut(("n0", "n1")), self.t))
        self.assertFalse(is_valid_cut(Cut(("n1", "nX")), self.t))
        self.assertTrue(is_valid_cut(Cut(("n1",)), self.t, self.t.node("n1")))


class TestCutProperties(unittest.TestCase):
    """Cut counting and enumeration on random trees with at most 12 leaves."""

    @settings(max_examples=300, deadline=None)
    @given(seed=seeds)
    def test_count_matches_enumeration(self, seed):
        t, _ = with_internal_members(seed)
        for node in t.nodes.values():
            self.assertEqual(count_cuts(node), len(enumerate_cuts(node, 10 ** 6)))

    @settings(max_examples=300, deadline=None)
    @given(seed=seeds)
    def test_every_enumerated_cut_partitions_the_leaves(self, seed):
        t, _ = with_internal_members(seed)
        cuts = enumerate_cuts(t.root, 10 ** 6)
        self.assertEqual(len(set(cuts)), len(cuts))
        for cut in cuts:
            self.assertTrue(is_valid_cut(cut, t))


class TestPruneObservedSubtrees(unittest.TestCase):
    """Tests for prune_observed_subtrees."""

    def test_prunes_below_observed_internal_word(self):
        t = parse_thesaurus("ROOT\n\tFOOD: food\n\t\tpizza\n\t\tpasta\n\tTOOL\n\t\tfork\n")
        pruned = prune_observed_subtrees(t, {"food", "fork"})
        food = pruned.node("n1")
        self.assertTrue(food.is_leaf)
        self.assertEqual(food.members, ("food",))
        self.assertNotIn("pizza", pruned)
        self.assertIn("fork", pruned)
        self.assertEqual(count_cuts(pruned.root), 3)

    def test_unchanged_tree_is_returned_as_is(self):
        t = parse_thesaurus(ANIMAL)
        self.assertIs(prune_observed_subtrees(t, {"bird", "bee"}), t)

    @settings(max_examples=300, deadline=None)
    @given(seed=seeds)
    def test_pruning_is_idempotent(self, seed):
        t, rng = with_internal_members(seed)
        words = t.words()
        observed = {w for w in words if rng.random() < 0.4}
        once = prune_observed_subtrees(t, observed)
        self.assertIs(prune_observed_subtrees(once, observed), once)
        for node in once.nodes.values():
            self.assertTrue(node.is_leaf or not observed.intersection(node.members))


if __name__ == "__main__":
    unittest.main()
