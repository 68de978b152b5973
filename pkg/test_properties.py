"""Property-based checks of the tick rule and the tree walks."""

import math
import unittest

import networkx as nx
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from dynamics import SemanticVariant, init_state, replay, step
from graph_core import random_connected, random_tree, rooted_tree
from strategies import simulate
from tree_strategies import euler_block_walk, euler_moves_bound, small_height_moves_bound, tree_small_height

PROPERTY_SETTINGS = settings(
    max_examples=120,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)

_VARIANT = st.builds(SemanticVariant, st.sampled_from(['strict', 'lenient']), st.booleans())


@st.composite
def _walks(draw):
    """A connected graph, a tau, a variant and a legal walk of up to 40 moves."""
    n = draw(st.integers(min_value=2, max_value=12))
    graph = random_connected(n, draw(st.sampled_from([0.0, 0.2, 0.5])), draw(st.integers(0, 10_000)))
    tau = draw(st.integers(min_value=0, max_value=4))
    variant = draw(_VARIANT)

    agents = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=2))
    choices = draw(st.lists(st.lists(st.integers(0, 1_000), min_size=len(agents), max_size=len(agents)),
                            max_size=40))
    moves = []
    positions = list(agents)
    for picks in choices:
        tick = []
        for index, pick in enumerate(picks):
            options = list(graph.neighbors(positions[index]))
            if variant.allow_stay:
                options.append(positions[index])
            positions[index] = options[pick % len(options)]
            tick.append(positions[index])
        moves.append(tuple(tick))
    return graph, tau, variant, agents, moves


class TestTickProperties(unittest.TestCase):
    """Invariants of a single tick, checked along random walks."""

    @PROPERTY_SETTINGS
    @given(case=_walks())
    def test_exposure_stays_below_threshold(self, case):
        """Test that no vertex keeps an exposure at or above its flip threshold."""
        graph, tau, variant, agents, moves = case
        state = init_state(graph, agents, tau, variant)
        ceiling = max(variant.threshold(tau) - 1, 0)
        for tick in moves:
            state, _ = step(state, tick)
            self.assertLessEqual(max(state.exposure), ceiling)
            for v in range(graph.n):
                if not state.clean[v]:
                    self.assertEqual(state.exposure[v], 0)

    @PROPERTY_SETTINGS
    @given(case=_walks())
    def test_contamination_spreads_one_hop(self, case):
        """Test that every flipped vertex borders contamination and holds no agent."""
        graph, tau, variant, agents, moves = case
        state = init_state(graph, agents, tau, variant)
        for tick in moves:
            before = state.clean
            state, record = step(state, tick)
            for v in record.recontaminated:
                self.assertTrue(before[v] or v in record.cleaned)
                self.assertNotIn(v, state.agents)
                self.assertTrue(any(not state.clean[u] for u in graph.neighbors(v)))

    @PROPERTY_SETTINGS
    @given(case=_walks())
    def test_contamination_needs_a_tick_per_hop(self, case):
        """Test that under the strict rule with tau >= 1 a vertex d hops from contamination stays clean for d ticks."""
        graph, tau, variant, agents, moves = case
        state = init_state(graph, agents, max(tau, 1), SemanticVariant('strict', variant.allow_stay))
        earliest = [0] * graph.n
        for tick in moves:
            dirty = state.contaminated()
            distance = nx.multi_source_dijkstra_path_length(graph.nx_view, dirty) if dirty else {}
            for v in range(graph.n):
                earliest[v] = max(earliest[v], state.tick + distance.get(v, math.inf))
            state, record = step(state, tick)
            for v in record.recontaminated:
                self.assertGreaterEqual(record.tick, earliest[v])

    @PROPERTY_SETTINGS
    @given(case=_walks())
    def test_exposure_restarts_away_from_contamination(self, case):
        """Test that exposure grows by one per exposed tick and is 0 wherever nothing borders contamination."""
        graph, tau, variant, agents, moves = case
        state = init_state(graph, agents, tau, variant)
        for tick in moves:
            before = state.exposure
            state, _ = step(state, tick)
            for v in range(graph.n):
                if not state.clean[v]:
                    continue
                if v in state.agents or all(state.clean[u] for u in graph.neighbors(v)):
                    self.assertEqual(state.exposure[v], 0)
                else:
                    self.assertIn(state.exposure[v], (0, before[v] + 1))

    @PROPERTY_SETTINGS
    @given(case=_walks())
    def test_agents_clean_at_most_their_number(self, case):
        """Test that a tick cleans at most one vertex per agent, each one an agent's destination."""
        graph, tau, variant, agents, moves = case
        state = init_state(graph, agents, tau, variant)
        for tick in moves:
            state, record = step(state, tick)
            self.assertLessEqual(len(record.cleaned), len(agents))
            self.assertTrue(set(record.cleaned) <= set(tick))
            for v in state.agents:
                self.assertTrue(state.clean[v])


class TestReplayProperties(unittest.TestCase):
    """Determinism of scripted runs."""

    @PROPERTY_SETTINGS
    @given(case=_walks())
    def test_replay_is_deterministic(self, case):
        """Test that the same script gives the same records twice."""
        graph, tau, variant, agents, moves = case
        destinations = [tick[0] for tick in moves]
        if not destinations:
            return
        first_outcome, first = replay(graph, agents[0], destinations, tau, variant)
        second_outcome, second = replay(graph, agents[0], destinations, tau, variant)
        self.assertEqual(first_outcome, second_outcome)
        self.assertEqual(first.records, second.records)


class TestTreeWalkProperties(unittest.TestCase):
    """The bounded-height walks on random trees."""

    @PROPERTY_SETTINGS
    @given(n=st.integers(min_value=2, max_value=80), seed=st.integers(0, 10_000),
           alpha=st.sampled_from([3.0, 4.0]))
    def test_monotone_at_alpha_height(self, n, seed, alpha):
        """Test monotone success at ceil(alpha h) within the move bound."""
        graph = random_tree(n, seed)
        tree = rooted_tree(graph)
        script = tree_small_height(tree, alpha)
        self.assertLessEqual(len(script), small_height_moves_bound(n, tree.height, alpha))

        outcome, trace, _ = simulate(graph, 'tree-smallh', alpha=alpha)
        self.assertEqual(trace.tau, math.ceil(alpha * tree.height))
        self.assertTrue(outcome.success)
        self.assertTrue(outcome.monotone)

    @PROPERTY_SETTINGS
    @given(n=st.integers(min_value=2, max_value=80), seed=st.integers(0, 10_000))
    def test_euler_baseline_within_eight_n(self, n, seed):
        """Test the cut Euler tour at alpha=3: at most 8n + 2h moves and monotone."""
        graph = random_tree(n, seed)
        tree = rooted_tree(graph)
        walk = euler_block_walk(tree, 3.0)
        self.assertLessEqual(len(walk) - 1, 8 * n + 2 * tree.height)
        self.assertLessEqual(len(walk) - 1, euler_moves_bound(n, tree.height, 3.0))

        outcome, _, _ = simulate(graph, 'tree-euler')
        self.assertTrue(outcome.success)
        self.assertTrue(outcome.monotone)


if __name__ == '__main__':
    unittest.main()
