"""
Exact immunity number of small graphs.

Breadth-first search over packed configurations (agent vertex plus the
status and exposure of every vertex), started from all placements at once
and driven by the same tick transition as the simulator.
"""

import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from tqdm import tqdm

from dynamics import SemanticVariant, advance, replay
from errors import InvariantError, ParameterError, ResourceError
from graph_core import Graph, TopologyDescriptor
from strategies import MoveScript, get_strategy, simulate


DEFAULT_STATE_BUDGET = 500_000_000
DEFAULT_MAX_EXPLORED = 20_000_000


class ConfigurationCodec:
    """Packs (agent, status, exposure) into one integer.

    Each vertex contributes a digit: 0 for contaminated, 1 + exposure for
    clean. The code is agent + n * digits.
    """

    def __init__(self, n: int, levels: int):
        self.n = n
        self.base = levels + 1

    @property
    def space(self) -> int:
        return self.n * self.base ** self.n

    def encode(self, agent: int, clean: List[bool], exposure: List[int]) -> int:
        packed = 0
        for v in range(self.n - 1, -1, -1):
            packed = packed * self.base + (exposure[v] + 1 if clean[v] else 0)
        return agent + self.n * packed

    def decode(self, code: int) -> Tuple[int, List[bool], List[int]]:
        packed, agent = divmod(code, self.n)
        clean = []
        exposure = []
        for _ in range(self.n):
            packed, digit = divmod(packed, self.base)
            clean.append(digit > 0)
            exposure.append(digit - 1 if digit else 0)
        return agent, clean, exposure


@dataclass
class Feasibility:
    tau: int
    feasible: bool
    states: int
    witness: Optional[MoveScript] = None


@dataclass
class OracleResult:
    graph_digest: str
    variant: SemanticVariant
    iota: Optional[int]
    table: List[Feasibility] = field(default_factory=list)
    witness: Optional[MoveScript] = None
    explored: int = 0
    seconds: float = 0.0

    def lines(self) -> List[str]:
        """The oracle report: one line per tau, then iota, then the witness."""
        out = [f"tau={row.tau} feasible={str(row.feasible).lower()} states={row.states}" for row in self.table]
        out.append(f"iota={'?' if self.iota is None else self.iota}")
        if self.witness is not None:
            out.extend(self.witness.format().splitlines())
        return out


@dataclass
class CrossCheckReport:
    strategy: str
    variant: SemanticVariant
    claimed_tau: int
    iota: int
    strategy_success: bool
    ticks: int

    @property
    def gap(self) -> int:
        return self.claimed_tau - self.iota

    @property
    def consistent(self) -> bool:
        return not self.strategy_success or self.iota <= self.claimed_tau


def _rebuild(parents: dict, code: int) -> MoveScript:
    moves = []
    while True:
        previous, move = parents[code]
        moves.append(move)
        if previous is None:
            break
        code = previous
    moves.reverse()
    return MoveScript(moves[0], tuple(moves[1:]))


def feasible(graph: Graph, tau: int, variant: Optional[SemanticVariant] = None,
             state_budget: int = DEFAULT_STATE_BUDGET, max_explored: int = DEFAULT_MAX_EXPLORED,
             show_progress: bool = False) -> Feasibility:
    """Whether one agent can make every vertex clean at once, with a shortest witness."""
    variant = variant or SemanticVariant()
    codec = ConfigurationCodec(graph.n, variant.rest_levels(tau))
    if codec.space > state_budget:
        raise ResourceError(
            f"configuration space n*{codec.base}^n = {codec.space} exceeds the state budget {state_budget}"
        )

    parents = {}
    frontier = []
    for v in range(graph.n):
        clean = [False] * graph.n
        clean[v] = True
        code = codec.encode(v, clean, [0] * graph.n)
        parents[code] = (None, v)
        frontier.append(code)
    if graph.n == 1:
        return Feasibility(tau, True, 1, MoveScript(0, ()))

    adjacency = graph.adjacency
    with tqdm(desc=f"tau={tau}", unit=" states", disable=not show_progress, leave=False) as bar:
        while frontier:
            following = []
            for code in frontier:
                agent, clean, exposure = codec.decode(code)
                options = adjacency[agent] + ((agent,) if variant.allow_stay else ())
                for there in options:
                    c, e, a = clean[:], exposure[:], [agent]
                    advance(graph, c, e, a, (there,), tau, variant)
                    nxt = codec.encode(there, c, e)
                    if nxt in parents:
                        continue
                    parents[nxt] = (code, there)
                    if all(c):
                        return Feasibility(tau, True, len(parents), _rebuild(parents, nxt))
                    following.append(nxt)
                if len(parents) > max_explored:
                    raise ResourceError(f"explored more than {max_explored} configurations at tau={tau}")
            bar.update(len(frontier))
            frontier = following

    return Feasibility(tau, False, len(parents))


def immunity_number(graph: Graph, variant: Optional[SemanticVariant] = None, tau_max: Optional[int] = None,
                    verify_above: int = 1, state_budget: int = DEFAULT_STATE_BUDGET,
                    max_explored: int = DEFAULT_MAX_EXPLORED, show_progress: bool = False) -> OracleResult:
    """Smallest feasible tau by linear scan, then a check that the next taus stay feasible."""
    variant = variant or SemanticVariant()
    if tau_max is None:
        tau_max = 2 * (graph.n - 1)
    started = time.perf_counter()
    result = OracleResult(graph.digest(), variant, None)

    for tau in range(tau_max + 1):
        row = feasible(graph, tau, variant, state_budget, max_explored, show_progress)
        result.table.append(row)
        result.explored += row.states
        if row.feasible:
            result.iota = tau
            result.witness = row.witness
            break

    if result.iota is not None:
        for tau in range(result.iota + 1, result.iota + 1 + verify_above):
            try:
                row = feasible(graph, tau, variant, state_budget, max_explored, show_progress)
            except ResourceError:
                break
            result.table.append(row)
            result.explored += row.states
            if not row.feasible:
                raise InvariantError(f"feasible at tau={result.iota} but not at tau={tau}")

    result.seconds = time.perf_counter() - started
    return result


def check_witness(graph: Graph, result: OracleResult) -> bool:
    """Replay the oracle's witness through the simulator."""
    if result.witness is None:
        return False
    outcome, _ = replay(graph, result.witness.placement, result.witness.destinations,
                        result.iota, result.variant, name='oracle-witness')
    return outcome.success


def cross_check(graph: Graph, strategy_name: str, variant: Optional[SemanticVariant] = None,
                desc: Optional[TopologyDescriptor] = None, result: Optional[OracleResult] = None,
                **oracle_options) -> CrossCheckReport:
    """Compare a strategy's claimed tau with the exact immunity number.

    A finished OracleResult for the same graph and variant may be passed in;
    the search is then not repeated.
    """
    strategy = get_strategy(strategy_name)
    if result is not None:
        if result.graph_digest != graph.digest():
            raise ParameterError("oracle result belongs to a different graph")
        if variant is not None and variant != result.variant:
            raise ParameterError(f"oracle result is for {result.variant.label()}, not {variant.label()}")
        variant = result.variant
    variant = variant or SemanticVariant(strategy.variant)
    claimed_tau = strategy.claimed_tau(graph, desc)
    outcome, _, _ = simulate(graph, strategy_name, claimed_tau, variant, desc)
    if result is None:
        result = immunity_number(graph, variant, **oracle_options)
    if result.iota is None:
        raise InvariantError(f"no feasible tau found for a graph on {graph.n} vertices")

    report = CrossCheckReport(strategy_name, variant, claimed_tau, result.iota, outcome.success, outcome.ticks_used)
    if not report.consistent:
        raise InvariantError(
            f"{strategy_name} cleaned the graph at tau={claimed_tau} but the oracle reports iota={result.iota}"
        )
    return report
