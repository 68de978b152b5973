"""
Discrete-time contagion engine.

One tick runs four phases in a fixed order:

1. agents move; every destination becomes clean with exposure 0;
2. every clean, unoccupied vertex with a contaminated neighbour (as of
   after phase 1) gains one unit of exposure, every other one resets to 0;
3. exposed vertices whose exposure reached the variant threshold flip back
   to contaminated, all at once;
4. the tick counter advances.

With tau = 0 recontamination is transitive within a tick: clean unoccupied
vertices connected to a flipped vertex through other clean unoccupied
vertices flip as well.
"""

import hashlib
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Protocol, Sequence, Tuple, Union

from errors import ContractError, ParameterError, StructureError
from graph_core import Graph


STRICT = 'strict'
LENIENT = 'lenient'
RULES = (STRICT, LENIENT)

FULLY_CLEAN = 'fully_clean'
BUDGET_EXHAUSTED = 'budget_exhausted'

DEFAULT_BUDGET_FACTOR = 8


@dataclass(frozen=True)
class SemanticVariant:
    """Recontamination rule plus whether agents may wait in place."""

    rule: str = STRICT
    allow_stay: bool = False

    def __post_init__(self):
        if self.rule not in RULES:
            raise ParameterError(f"unknown recontamination rule '{self.rule}' (expected one of {RULES})")

    def threshold(self, tau: int) -> int:
        """Exposure at which an exposed vertex flips."""
        return tau if self.rule == STRICT else tau + 1

    def rest_levels(self, tau: int) -> int:
        """How many exposure values a clean vertex can hold between ticks."""
        return max(1, self.threshold(tau))

    def label(self) -> str:
        return f"{self.rule}+stay" if self.allow_stay else self.rule

    @classmethod
    def parse(cls, text: str) -> 'SemanticVariant':
        rule, _, extra = text.partition('+')
        if extra not in ('', 'stay'):
            raise ParameterError(f"unknown variant suffix '{extra}'")
        return cls(rule, extra == 'stay')


@dataclass(frozen=True)
class SimState:
    """Full world state at one tick."""

    graph: Graph
    tau: int
    variant: SemanticVariant
    tick: int
    agents: Tuple[int, ...]
    clean: Tuple[bool, ...]
    exposure: Tuple[int, ...]

    @property
    def clean_count(self) -> int:
        return sum(self.clean)

    @property
    def fully_clean(self) -> bool:
        return all(self.clean)

    @property
    def agent(self) -> int:
        return self.agents[0]

    def contaminated(self) -> List[int]:
        return [v for v, c in enumerate(self.clean) if not c]

    def is_clean(self, v: int) -> bool:
        return self.clean[v]


@dataclass(frozen=True)
class TickRecord:
    tick: int
    moves: Tuple[int, ...]
    cleaned: Tuple[int, ...]
    recontaminated: Tuple[int, ...]
    clean_count: int
    exposure_digest: str = ''


@dataclass
class Trace:
    """Append-only per-tick log of one run."""

    graph_digest: str
    tau: int
    variant: SemanticVariant
    strategy: str
    placements: Tuple[int, ...]
    records: List[TickRecord] = field(default_factory=list)

    def append(self, record: TickRecord):
        self.records.append(record)

    def destinations(self) -> List[int]:
        return [r.moves[0] for r in self.records]

    def recontaminations(self) -> int:
        return sum(len(r.recontaminated) for r in self.records)

    @property
    def monotone(self) -> bool:
        return all(not r.recontaminated for r in self.records)


@dataclass(frozen=True)
class Outcome:
    verdict: str
    ticks_used: int
    peak_clean: int
    monotone: bool
    max_exposure: int = 0

    @property
    def success(self) -> bool:
        return self.verdict == FULLY_CLEAN


class Pilot(Protocol):
    """Anything that can steer a single agent through a run."""

    name: str
    placement: int

    def next_move(self, state: SimState) -> Optional[int]:
        ...


def advance(
    graph: Graph,
    clean: List[bool],
    exposure: List[int],
    agents: List[int],
    destinations: Sequence[int],
    tau: int,
    variant: SemanticVariant,
) -> Tuple[List[int], List[int]]:
    """Apply one tick in place; returns (newly cleaned, recontaminated).

    Shared by the simulator and the exact oracle.
    """
    if len(destinations) != len(agents):
        raise ContractError(f"expected {len(agents)} destination(s), got {len(destinations)}")

    neighbor_sets = graph.neighbor_sets
    cleaned = []
    for index, (here, there) in enumerate(zip(agents, destinations)):
        legal = there in neighbor_sets[here] or (variant.allow_stay and there == here)
        if not legal:
            raise ContractError(f"agent {index} cannot move {here} -> {there}: not an edge of the graph")
        if not clean[there]:
            clean[there] = True
            cleaned.append(there)
        exposure[there] = 0
        agents[index] = there

    occupied = set(agents)
    adjacency = graph.adjacency
    exposed = []
    for v in range(graph.n):
        if not clean[v] or v in occupied:
            continue
        if any(not clean[u] for u in adjacency[v]):
            exposure[v] += 1
            exposed.append(v)
        else:
            exposure[v] = 0

    threshold = variant.threshold(tau)
    flipped = [v for v in exposed if exposure[v] >= threshold]
    for v in flipped:
        clean[v] = False
        exposure[v] = 0

    if tau == 0 and flipped:
        queue = deque(flipped)
        while queue:
            u = queue.popleft()
            for w in adjacency[u]:
                if clean[w] and w not in occupied:
                    clean[w] = False
                    exposure[w] = 0
                    flipped.append(w)
                    queue.append(w)

    return sorted(cleaned), sorted(flipped)


def exposure_digest(clean: Sequence[bool], exposure: Sequence[int]) -> str:
    data = ','.join(str(e) if c else '-' for c, e in zip(clean, exposure))
    return hashlib.sha256(data.encode('ascii')).hexdigest()[:12]


def init_state(graph: Graph, placements: Sequence[int], tau: int,
               variant: Optional[SemanticVariant] = None) -> SimState:
    """All vertices contaminated except the agents' starting vertices."""
    variant = variant or SemanticVariant()
    if not placements:
        raise ContractError("at least one agent placement is required")
    if tau < 0:
        raise ParameterError(f"tau must be non-negative, got {tau}")
    for v in placements:
        if not 0 <= v < graph.n:
            raise ContractError(f"placement {v} outside vertex range 0..{graph.n - 1}")

    clean = [False] * graph.n
    for v in placements:
        clean[v] = True
    return SimState(graph, tau, variant, 0, tuple(placements), tuple(clean), (0,) * graph.n)


def step(state: SimState, moves: Union[int, Sequence[int]]) -> Tuple[SimState, TickRecord]:
    """Advance one tick; moves is one destination per agent (an int for one agent)."""
    destinations = (moves,) if isinstance(moves, int) else tuple(moves)
    clean = list(state.clean)
    exposure = list(state.exposure)
    agents = list(state.agents)

    cleaned, flipped = advance(state.graph, clean, exposure, agents, destinations, state.tau, state.variant)

    nxt = SimState(state.graph, state.tau, state.variant, state.tick + 1,
                   tuple(agents), tuple(clean), tuple(exposure))
    record = TickRecord(
        tick=nxt.tick,
        moves=destinations,
        cleaned=tuple(cleaned),
        recontaminated=tuple(flipped),
        clean_count=nxt.clean_count,
        exposure_digest=exposure_digest(clean, exposure),
    )
    return nxt, record


def default_tick_budget(graph: Graph, tau: int, factor: int = DEFAULT_BUDGET_FACTOR) -> int:
    return factor * graph.n * (tau + 2)


def run(graph: Graph, pilot: Pilot, tau: int, variant: Optional[SemanticVariant] = None,
        tick_budget: Optional[int] = None) -> Tuple[Outcome, Trace]:
    """Drive a pilot until the graph is clean, the budget runs out, or the pilot stops."""
    variant = variant or SemanticVariant()
    if tick_budget is None:
        tick_budget = default_tick_budget(graph, tau)
    if tick_budget < 1:
        raise ParameterError(f"tick budget must be at least 1, got {tick_budget}")

    state = init_state(graph, [pilot.placement], tau, variant)
    trace = Trace(graph.digest(), tau, variant, pilot.name, state.agents)
    peak = state.clean_count
    max_exposure = 0

    while not state.fully_clean and state.tick < tick_budget:
        move = pilot.next_move(state)
        if move is None:
            break
        state, record = step(state, move)
        trace.append(record)
        peak = max(peak, record.clean_count)
        max_exposure = max(max_exposure, max(state.exposure))

    outcome = Outcome(
        verdict=FULLY_CLEAN if state.fully_clean else BUDGET_EXHAUSTED,
        ticks_used=state.tick,
        peak_clean=peak,
        monotone=trace.monotone,
        max_exposure=max_exposure,
    )
    return outcome, trace


class ScriptedPilot:
    """Replays a fixed list of destinations."""

    def __init__(self, placement: int, destinations: Iterable[int], name: str = 'script'):
        self.name = name
        self.placement = placement
        self.notes = {}
        self._moves = iter(destinations)

    def next_move(self, state: SimState) -> Optional[int]:
        return next(self._moves, None)


def replay(graph: Graph, placement: int, destinations: Sequence[int], tau: int,
           variant: Optional[SemanticVariant] = None, name: str = 'script') -> Tuple[Outcome, Trace]:
    """Run a fixed move list; the budget is the list length."""
    pilot = ScriptedPilot(placement, destinations, name)
    return run(graph, pilot, tau, variant, tick_budget=max(1, len(destinations)))


# ---------------------------------------------------------------------------
# Trace files
# ---------------------------------------------------------------------------

def _csv(values: Iterable[int]) -> str:
    return ','.join(str(v) for v in values)


def format_trace(trace: Trace) -> str:
    lines = [
        f"# graph={trace.graph_digest} tau={trace.tau} variant={trace.variant.label()} "
        f"strategy={trace.strategy} placement={_csv(trace.placements)}"
    ]
    for r in trace.records:
        lines.append(
            f"{r.tick} {_csv(r.moves)} cleaned={_csv(r.cleaned)} "
            f"recontaminated={_csv(r.recontaminated)} clean_count={r.clean_count}"
        )
    return '\n'.join(lines) + '\n'


def write_trace(trace: Trace, path: Union[str, Path]):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(format_trace(trace))


def _parse_csv(text: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in text.split(',') if v)


def parse_trace(text: str) -> Trace:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith('#'):
        raise StructureError("trace is missing its header line")

    header = dict(item.split('=', 1) for item in lines[0][1:].split())
    try:
        trace = Trace(
            graph_digest=header['graph'],
            tau=int(header['tau']),
            variant=SemanticVariant.parse(header['variant']),
            strategy=header['strategy'],
            placements=_parse_csv(header['placement']),
        )
    except KeyError as e:
        raise StructureError(f"trace header lacks field {e}")

    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != 5:
            raise StructureError(f"trace line {lineno}: expected 5 fields, got {len(fields)}")
        values = dict(f.split('=', 1) for f in fields[2:])
        trace.append(TickRecord(
            tick=int(fields[0]),
            moves=_parse_csv(fields[1]),
            cleaned=_parse_csv(values['cleaned']),
            recontaminated=_parse_csv(values['recontaminated']),
            clean_count=int(values['clean_count']),
        ))
    return trace


def read_trace(path: Union[str, Path]) -> Trace:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_trace(f.read())
