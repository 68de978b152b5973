import unittest
from itertools import islice

import networkx as nx

from errors import ContractError, ResourceError
from matching import (
    CutInstance,
    brute_force_matching,
    colex_subsets,
    max_cut_matching,
    square_mesh,
    verify_lemma,
)


def networkx_matching_size(instance):
    """Maximum cut matching computed with Hopcroft-Karp on an explicit bipartite graph."""
    g = nx.Graph()
    left = [('w', w) for w in instance.subset]
    g.add_nodes_from(left)
    g.add_edges_from((('w', w), ('v', v)) for w, v in instance.cut_edges())
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    return len(matching) // 2


class TestCutInstance(unittest.TestCase):
    """Test subset validation and cut edges."""

    def test_contract(self):
        """Test odd meshes, wrong sizes and out-of-range vertices."""
        with self.assertRaises(ContractError):
            CutInstance(3, frozenset(range(4)))
        with self.assertRaises(ContractError):
            CutInstance(2, frozenset({0}))
        with self.assertRaises(ContractError):
            CutInstance(2, frozenset({0, 7}))

    def test_column_cut(self):
        """Test the first two columns of the 4x4 mesh: four horizontal cut edges."""
        instance = CutInstance(4, frozenset(range(8)))
        self.assertEqual(instance.cut_edges(), [(4, 8), (5, 9), (6, 10), (7, 11)])
        self.assertTrue(instance.is_rectangular())
        self.assertEqual(max_cut_matching(instance).size, 4)

    def test_diagonal_pair(self):
        """Test the diagonal subset of the 2x2 mesh."""
        instance = CutInstance(2, frozenset({0, 3}))
        self.assertFalse(instance.is_rectangular())
        self.assertEqual(len(instance.cut_edges()), 4)
        result = max_cut_matching(instance)
        self.assertEqual(result.size, 2)
        self.assertEqual(len({w for w, _ in result.edges}), 2)
        self.assertEqual(len({v for _, v in result.edges}), 2)

    def test_matching_edges_are_cut_edges(self):
        """Test that every matched pair crosses the cut and is a mesh edge."""
        mesh = square_mesh(4)
        instance = CutInstance(4, frozenset({0, 2, 5, 7, 8, 10, 13, 15}))
        for w, v in max_cut_matching(instance).edges:
            with self.subTest(w=w, v=v):
                self.assertIn(w, instance.subset)
                self.assertNotIn(v, instance.subset)
                self.assertIn(v, mesh.neighbors(w))


class TestMatchingAgreement(unittest.TestCase):
    """Test the augmenting-path matching against independent solvers."""

    def test_brute_force_on_small_cuts(self):
        """Test agreement with brute force on 4x4 subsets with at most 12 cut edges."""
        checked = 0
        for subset in colex_subsets(16, 8):
            instance = CutInstance(4, frozenset(subset))
            if len(instance.cut_edges()) > 12:
                continue
            with self.subTest(subset=subset):
                self.assertEqual(max_cut_matching(instance).size, brute_force_matching(instance))
            checked += 1
            if checked == 150:
                break
        self.assertEqual(checked, 150)

    def test_hopcroft_karp(self):
        """Test agreement with networkx on a slice of 4x4 and 6x6 subsets."""
        for subset in islice(colex_subsets(16, 8), 0, 12870, 37):
            instance = CutInstance(4, frozenset(subset))
            with self.subTest(subset=subset):
                self.assertEqual(max_cut_matching(instance).size, networkx_matching_size(instance))

        report = verify_lemma(6, 'sampled', samples=1, seed=3)
        instance = CutInstance(6, frozenset(report.worst))
        self.assertEqual(max_cut_matching(instance).size, networkx_matching_size(instance))

    def test_brute_force_limit(self):
        """Test that large cuts are refused by brute force."""
        instance = CutInstance(4, frozenset({0, 2, 5, 7, 8, 10, 13, 15}))
        with self.assertRaises(ResourceError):
            brute_force_matching(instance, max_edges=12)


class TestVerifyLemma(unittest.TestCase):
    """Test the extensional check of the matching bound."""

    def test_exhaustive_side_two(self):
        """Test all six half-subsets of the 2x2 mesh."""
        report = verify_lemma(2)
        self.assertEqual(report.checked, 6)
        self.assertEqual(report.minimum, 2)
        self.assertTrue(report.passed)
        self.assertEqual(report.minimizers, 6)
        self.assertEqual(report.rectangular_minimizers, 4)
        self.assertEqual(report.non_rectangular_minimizers, 2)

    def test_exhaustive_side_four(self):
        """Test all 12870 half-subsets of the 4x4 mesh."""
        report = verify_lemma(4)
        self.assertEqual(report.checked, 12870)
        self.assertEqual(report.minimum, 4)
        self.assertTrue(report.passed)
        self.assertEqual(report.worst, tuple(range(8)))
        self.assertEqual(report.rectangular_minimizers, 4)
        self.assertGreaterEqual(report.minimizers, report.rectangular_minimizers)
        self.assertLessEqual(len(report.non_rectangular_examples), 5)

    def test_sampled_mode_is_seeded(self):
        """Test that sampling records its seed and repeats under it."""
        first = verify_lemma(6, 'sampled', samples=200, seed=1)
        second = verify_lemma(6, 'sampled', samples=200, seed=1)
        self.assertEqual(first.checked, 200)
        self.assertEqual(first.seed, 1)
        self.assertTrue(first.passed)
        self.assertEqual((first.minimum, first.worst), (second.minimum, second.worst))
        self.assertIn("mode=sampled (probabilistic evidence, seed=1)", first.lines())

    def test_report_lines(self):
        """Test the key=value report."""
        lines = verify_lemma(2).lines()
        self.assertEqual(lines[:6], ["side=2", "mode=exhaustive", "subsets=6", "minimum=2", "bound=2", "pass=true"])

    def test_invalid_requests(self):
        """Test odd sides, unknown modes and oversized exhaustive runs."""
        with self.assertRaises(ContractError):
            verify_lemma(3)
        with self.assertRaises(ContractError):
            verify_lemma(4, 'random')
        with self.assertRaises(ResourceError):
            verify_lemma(6)

    def test_colex_order(self):
        """Test colexicographic order on small cases."""
        self.assertEqual(colex_subsets(4, 2), [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)])


if __name__ == '__main__':
    unittest.main()
