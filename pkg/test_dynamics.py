import os
import tempfile
import unittest

from dynamics import (
    BUDGET_EXHAUSTED,
    FULLY_CLEAN,
    ScriptedPilot,
    SemanticVariant,
    default_tick_budget,
    format_trace,
    init_state,
    parse_trace,
    read_trace,
    replay,
    run,
    step,
    write_trace,
)
from errors import ContractError, ParameterError, StructureError
from graph_core import Graph, TopologyDescriptor, build_graph
from strategies import compile_script, simulate


def graph_of(family, *params):
    return build_graph(TopologyDescriptor(family, tuple(params)))


class TestSemanticVariant(unittest.TestCase):
    """Test thresholds and variant labels."""

    def test_thresholds(self):
        """Test that strict flips at tau and lenient one tick later."""
        strict = SemanticVariant('strict')
        lenient = SemanticVariant('lenient')
        for tau in range(5):
            with self.subTest(tau=tau):
                self.assertEqual(strict.threshold(tau), tau)
                self.assertEqual(lenient.threshold(tau), tau + 1)
        self.assertEqual(strict.rest_levels(0), 1)
        self.assertEqual(strict.rest_levels(3), 3)
        self.assertEqual(lenient.rest_levels(3), 4)

    def test_parse_and_label(self):
        """Test the text form used on the command line and in trace headers."""
        for text in ('strict', 'lenient', 'strict+stay', 'lenient+stay'):
            with self.subTest(text=text):
                self.assertEqual(SemanticVariant.parse(text).label(), text)
        self.assertTrue(SemanticVariant.parse('strict+stay').allow_stay)
        self.assertFalse(SemanticVariant.parse('lenient').allow_stay)

    def test_unknown_variants_rejected(self):
        """Test that unknown rules and suffixes raise ParameterError."""
        for text in ('bogus', 'strict+wait', 'lenient+stay+stay'):
            with self.subTest(text=text):
                with self.assertRaises(ParameterError):
                    SemanticVariant.parse(text)


class TestInitState(unittest.TestCase):
    """Test the initial world state."""

    def test_only_placements_are_clean(self):
        """Test that everything except the agents' vertices starts contaminated."""
        g = graph_of('cycle', 5)
        state = init_state(g, [2], 2)
        self.assertEqual(state.tick, 0)
        self.assertEqual(state.agents, (2,))
        self.assertEqual(state.clean, (False, False, True, False, False))
        self.assertEqual(state.exposure, (0,) * 5)
        self.assertEqual(state.contaminated(), [0, 1, 3, 4])

    def test_contract_violations(self):
        """Test empty placements, negative tau and out-of-range vertices."""
        g = graph_of('path', 4)
        with self.assertRaises(ContractError):
            init_state(g, [], 1)
        with self.assertRaises(ParameterError):
            init_state(g, [0], -1)
        with self.assertRaises(ContractError):
            init_state(g, [4], 1)

    def test_single_vertex_graph_starts_clean(self):
        """Test that P_1 is clean before any move."""
        outcome, trace = replay(graph_of('path', 1), 0, [], 0)
        self.assertEqual(outcome.verdict, FULLY_CLEAN)
        self.assertEqual(outcome.ticks_used, 0)
        self.assertEqual(trace.records, [])


class TestStep(unittest.TestCase):
    """Test the four-phase tick on hand-checked examples."""

    def test_cycle_recontamination_at_tau_two(self):
        """Test C_4 walked 0-1-2-3-0 at tau=2: vertex 0 flips at tick 2, clean at tick 4."""
        g = graph_of('cycle', 4)
        outcome, trace = replay(g, 0, [1, 2, 3, 0], 2)

        self.assertEqual(outcome.verdict, FULLY_CLEAN)
        self.assertEqual(outcome.ticks_used, 4)
        self.assertFalse(outcome.monotone)
        self.assertEqual(outcome.peak_clean, 4)
        self.assertEqual(trace.records[1].tick, 2)
        self.assertEqual(trace.records[1].recontaminated, (0,))
        self.assertEqual(trace.recontaminations(), 1)

    def test_complete_graph_sequence(self):
        """Test K_4 visited in order at tau=3: clean at tick 3 with exposure never above 2."""
        outcome, trace = replay(graph_of('complete', 4), 0, [1, 2, 3], 3)
        self.assertEqual(outcome.verdict, FULLY_CLEAN)
        self.assertEqual(outcome.ticks_used, 3)
        self.assertTrue(outcome.monotone)
        self.assertEqual(outcome.max_exposure, 2)

    def test_path_at_tau_zero(self):
        """Test that a path swept end to end stays clean even at tau=0."""
        outcome, _ = replay(graph_of('path', 4), 0, [1, 2, 3], 0)
        self.assertEqual(outcome.verdict, FULLY_CLEAN)
        self.assertEqual(outcome.ticks_used, 3)
        self.assertTrue(outcome.monotone)

    def test_tau_zero_cascade(self):
        """Test that a flip at tau=0 spreads through clean unoccupied neighbours in the same tick."""
        g = graph_of('star', 3)
        state = init_state(g, [1], 0)
        state, _ = step(state, 0)
        self.assertEqual(state.clean, (True, True, False, False))

        state, record = step(state, 2)
        self.assertEqual(record.recontaminated, (0, 1))
        self.assertEqual(state.clean, (False, False, True, False))

    def test_tau_one_does_not_cascade(self):
        """Test the same walk at tau=1: only the exposed centre flips."""
        g = graph_of('star', 3)
        state = init_state(g, [1], 1)
        state, _ = step(state, 0)
        state, record = step(state, 2)
        self.assertEqual(record.recontaminated, (0,))
        self.assertEqual(state.clean, (False, True, True, False))

    def test_lenient_holds_one_tick_longer(self):
        """Test that the C_4 walk is monotone under the lenient rule."""
        outcome, _ = replay(graph_of('cycle', 4), 0, [1, 2, 3, 0], 2, SemanticVariant('lenient'))
        self.assertEqual(outcome.verdict, FULLY_CLEAN)
        self.assertTrue(outcome.monotone)

    def test_destination_becomes_clean_with_zero_exposure(self):
        """Test phase one on a vertex that was already clean and exposed."""
        g = graph_of('path', 3)
        state = init_state(g, [1], 5)
        state, _ = step(state, 0)
        self.assertEqual(state.exposure[1], 1)
        state, record = step(state, 1)
        self.assertEqual(state.exposure[1], 0)
        self.assertEqual(record.cleaned, ())

    def test_illegal_move_names_the_agent(self):
        """Test that a non-edge move raises ContractError mentioning the agent."""
        state = init_state(graph_of('path', 4), [0], 1)
        with self.assertRaises(ContractError) as ctx:
            step(state, 2)
        self.assertIn("agent 0", str(ctx.exception))

    def test_stay_needs_the_variant_flag(self):
        """Test that staying put is illegal unless the variant allows it."""
        g = graph_of('path', 3)
        with self.assertRaises(ContractError):
            step(init_state(g, [0], 1), 0)

        state, record = step(init_state(g, [0], 1, SemanticVariant('strict', True)), 0)
        self.assertEqual(state.tick, 1)
        self.assertEqual(state.agents, (0,))
        self.assertEqual(record.cleaned, ())

    def test_multiple_agents_move_together(self):
        """Test two agents on the 2x2 mesh finishing in one tick."""
        g = graph_of('mesh', 2, 2)
        state = init_state(g, [0, 3], 1)
        state, record = step(state, (1, 2))
        self.assertTrue(state.fully_clean)
        self.assertEqual(record.cleaned, (1, 2))
        self.assertEqual(record.moves, (1, 2))

        with self.assertRaises(ContractError):
            step(state, 0)


class TestRun(unittest.TestCase):
    """Test the run loop and its budget handling."""

    def test_exhausted_when_script_ends(self):
        """Test a sweep from the middle of P_5: the pilot stops and the run is exhausted."""
        outcome, trace = replay(graph_of('path', 5), 2, [3, 4], 0)
        self.assertEqual(outcome.verdict, BUDGET_EXHAUSTED)
        self.assertEqual(outcome.ticks_used, 2)
        self.assertEqual(outcome.peak_clean, 1)
        self.assertFalse(outcome.success)

    def test_pilot_returning_none_ends_early(self):
        """Test that a pilot out of moves ends the run before the budget."""
        g = graph_of('path', 4)
        outcome, _ = run(g, ScriptedPilot(0, [1]), 1, tick_budget=100)
        self.assertEqual(outcome.verdict, BUDGET_EXHAUSTED)
        self.assertEqual(outcome.ticks_used, 1)

    def test_budget_stops_the_run(self):
        """Test that the tick budget is a hard cap."""
        g = graph_of('path', 6)
        outcome, trace = run(g, ScriptedPilot(0, [1, 2, 3, 4, 5]), 0, tick_budget=3)
        self.assertEqual(outcome.verdict, BUDGET_EXHAUSTED)
        self.assertEqual(outcome.ticks_used, 3)
        self.assertEqual(len(trace.records), 3)

    def test_invalid_budget(self):
        """Test that a budget below one tick raises ParameterError."""
        with self.assertRaises(ParameterError):
            run(graph_of('path', 3), ScriptedPilot(0, [1]), 0, tick_budget=0)

    def test_default_budget(self):
        """Test the default budget formula."""
        self.assertEqual(default_tick_budget(graph_of('cycle', 5), 2), 8 * 5 * 4)
        self.assertEqual(default_tick_budget(graph_of('cycle', 5), 2, factor=2), 2 * 5 * 4)

    def test_strict_success_implies_lenient_success(self):
        """Test that scripts that clean a graph under strict also clean it under lenient."""
        cases = [
            ('cycle', (6,), 'cycle-sweep', 2),
            ('complete', (5,), 'complete-seq', 4),
            ('mesh', (3, 4), 'mesh-column', 3),
            ('star', (4,), 'star-shuttle', 1),
        ]
        for family, params, name, tau in cases:
            with self.subTest(family=family, params=params):
                desc = TopologyDescriptor(family, params)
                g = build_graph(desc)
                outcome, trace, _ = simulate(g, name, tau, SemanticVariant('strict'), desc)
                self.assertTrue(outcome.success)
                script = compile_script(trace)
                lenient, _ = replay(g, script.placement, script.destinations, tau, SemanticVariant('lenient'))
                self.assertTrue(lenient.success)


class TestTraces(unittest.TestCase):
    """Test trace text and replay determinism."""

    def run_mesh(self):
        desc = TopologyDescriptor('mesh', (3, 4))
        g = build_graph(desc)
        outcome, trace, _ = simulate(g, 'mesh-column', desc=desc)
        return g, outcome, trace

    def test_trace_text_round_trip(self):
        """Test that formatting a parsed trace gives back the same text."""
        _, _, trace = self.run_mesh()
        text = format_trace(trace)
        self.assertTrue(text.startswith("# graph="))
        self.assertEqual(format_trace(parse_trace(text)), text)

    def test_trace_file(self):
        """Test writing and reading a trace file."""
        _, _, trace = self.run_mesh()
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.trace")
            write_trace(trace, path)
            loaded = read_trace(path)
        self.assertEqual(loaded.destinations(), trace.destinations())
        self.assertEqual(loaded.variant, trace.variant)
        self.assertEqual(loaded.placements, trace.placements)

    def test_replay_is_deterministic(self):
        """Test that replaying a recorded run reproduces it tick for tick."""
        g, outcome, trace = self.run_mesh()
        script = compile_script(trace)
        again, again_trace = replay(g, script.placement, script.destinations, trace.tau, trace.variant,
                                    name=trace.strategy)
        self.assertEqual(again, outcome)
        self.assertEqual(format_trace(again_trace), format_trace(trace))
        self.assertEqual([r.exposure_digest for r in again_trace.records],
                         [r.exposure_digest for r in trace.records])

    def test_malformed_traces(self):
        """Test that broken trace text raises StructureError."""
        for text in ("", "1 2 cleaned= recontaminated= clean_count=1\n",
                     "# graph=x tau=1 variant=strict strategy=s placement=0\n1 2 cleaned=\n",
                     "# graph=x tau=1 variant=strict\n"):
            with self.subTest(text=text):
                with self.assertRaises(StructureError):
                    parse_trace(text)

    def test_graph_digest_is_recorded(self):
        """Test that the trace names the graph it was recorded on."""
        g, _, trace = self.run_mesh()
        self.assertEqual(trace.graph_digest, g.digest())
        self.assertNotEqual(g.digest(), Graph.from_edges(3, [(0, 1), (1, 2)]).digest())


if __name__ == '__main__':
    unittest.main()
