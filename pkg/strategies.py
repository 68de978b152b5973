"""
Single-agent decontamination strategies and the strategy catalog.

A strategy is either a fixed MoveScript or a full-information policy that
looks at the live SimState before each move. Both are exposed to the
engine as pilots (objects with ``placement`` and ``next_move``).

Tree strategies live in tree_strategies.py and register themselves into
the same catalog.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple, Union

import networkx as nx

from dynamics import (
    LENIENT,
    STRICT,
    Outcome,
    Pilot,
    ScriptedPilot,
    SemanticVariant,
    SimState,
    Trace,
    run,
)
from errors import ApplicabilityError, StructureError
from graph_core import Graph, TopologyDescriptor, dfs_tree, euler_tour, kahn_pair, mesh_vertex


@dataclass(frozen=True)
class MoveScript:
    """Initial placement plus the destination of every following tick."""

    placement: int
    destinations: Tuple[int, ...]
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.destinations)

    def validate(self, graph: Graph):
        here = self.placement
        for there in self.destinations:
            if there not in graph.neighbor_sets[here]:
                raise StructureError(f"script step {here} -> {there} is not an edge")
            here = there

    def pilot(self, name: str = 'script') -> ScriptedPilot:
        return ScriptedPilot(self.placement, self.destinations, name)

    def format(self) -> str:
        lines = [f"placement {self.placement}"]
        lines.extend(str(v) for v in self.destinations)
        return '\n'.join(lines) + '\n'

    @classmethod
    def parse(cls, text: str) -> 'MoveScript':
        lines = [line.split('#', 1)[0].strip() for line in text.splitlines()]
        lines = [line for line in lines if line]
        if not lines or not lines[0].startswith('placement '):
            raise StructureError("move script must start with 'placement <vertex>'")
        return cls(int(lines[0].split()[1]), tuple(int(v) for v in lines[1:]))

    def write(self, path: Union[str, Path]):
        with open(path, 'w', encoding='utf-8') as f:
            f.write(self.format())


class ProgramPilot:
    """Turns a generator program into a pilot.

    The program receives the pilot itself and reads ``pilot.state`` (the
    state the next move is chosen against) every time it resumes.
    """

    def __init__(self, name: str, placement: int, program: Callable[['ProgramPilot'], Iterator[int]]):
        self.name = name
        self.placement = placement
        self.state: Optional[SimState] = None
        self.notes: Dict[str, Any] = {}
        self._program = program
        self._moves: Optional[Iterator[int]] = None

    def next_move(self, state: SimState) -> Optional[int]:
        self.state = state
        if self._moves is None:
            self._moves = iter(self._program(self))
        return next(self._moves, None)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

TauFormula = Callable[[Graph, Optional[TopologyDescriptor], Dict[str, Any]], int]
Builder = Callable[[Graph, Optional[TopologyDescriptor], int, Dict[str, Any]], Pilot]


@dataclass(frozen=True)
class Strategy:
    """Catalog entry: a named builder with its claimed tau and variant."""

    name: str
    variant: str
    monotone: Optional[bool]
    summary: str
    tau_formula: TauFormula
    builder: Builder

    def claimed_tau(self, graph: Graph, desc: Optional[TopologyDescriptor] = None, **options) -> int:
        return self.tau_formula(graph, desc, options)

    def pilot(self, graph: Graph, tau: int, desc: Optional[TopologyDescriptor] = None, **options) -> Pilot:
        return self.builder(graph, desc, tau, options)

    def applies(self, graph: Graph, desc: Optional[TopologyDescriptor] = None, **options) -> bool:
        try:
            self.pilot(graph, self.claimed_tau(graph, desc, **options), desc, **options)
        except ApplicabilityError:
            return False
        return True


_REGISTRY: Dict[str, Strategy] = {}


def register(name: str, variant: str, monotone: Optional[bool], tau: TauFormula, summary: str):
    def decorate(builder: Builder) -> Builder:
        _REGISTRY[name] = Strategy(name, variant, monotone, summary, tau, builder)
        return builder
    return decorate


def catalog() -> Dict[str, Strategy]:
    import tree_strategies  # noqa: F401  (registers the tree strategies)
    return dict(_REGISTRY)


def get_strategy(name: str) -> Strategy:
    strategies = catalog()
    if name not in strategies:
        raise ApplicabilityError(f"unknown strategy '{name}' (known: {', '.join(sorted(strategies))})")
    return strategies[name]


def simulate(graph: Graph, name: str, tau: Optional[int] = None, variant: Optional[SemanticVariant] = None,
             desc: Optional[TopologyDescriptor] = None, tick_budget: Optional[int] = None,
             **options) -> Tuple[Outcome, Trace, Pilot]:
    """Run a catalog strategy; tau and variant default to its own contract."""
    strategy = get_strategy(name)
    if tau is None:
        tau = strategy.claimed_tau(graph, desc, **options)
    variant = variant or SemanticVariant(strategy.variant)
    pilot = strategy.pilot(graph, tau, desc, **options)
    outcome, trace = run(graph, pilot, tau, variant, tick_budget)
    return outcome, trace, pilot


def compile_script(trace: Trace) -> MoveScript:
    """Freeze a recorded run back into a script."""
    return MoveScript(trace.placements[0], tuple(trace.destinations()))


def script_pilot(script: MoveScript, name: str) -> ScriptedPilot:
    return script.pilot(name)


# ---------------------------------------------------------------------------
# Structural recognizers
# ---------------------------------------------------------------------------

def path_ends(graph: Graph) -> List[int]:
    if not graph.is_tree() or graph.max_degree > 2:
        raise ApplicabilityError("graph is not a path")
    return [v for v in range(graph.n) if graph.degree(v) <= 1]


def cycle_order(graph: Graph) -> List[int]:
    """Vertices in walk order from 0 towards its lower neighbour."""
    if graph.n < 3 or any(graph.degree(v) != 2 for v in range(graph.n)):
        raise ApplicabilityError("graph is not a cycle")
    order = [0, graph.adjacency[0][0]]
    while len(order) < graph.n:
        a, b = graph.adjacency[order[-1]]
        order.append(b if a == order[-2] else a)
    return order


def bipartite_sides(graph: Graph) -> Tuple[List[int], List[int]]:
    """(smaller side, larger side) of a complete bipartite graph."""
    nx_graph = graph.to_networkx()
    if graph.n < 2 or not nx.is_bipartite(nx_graph):
        raise ApplicabilityError("graph is not bipartite")
    left, right = (sorted(s) for s in nx.bipartite.sets(nx_graph))
    if graph.edge_count != len(left) * len(right):
        raise ApplicabilityError("bipartite graph is not complete")
    if (len(right), right[0]) < (len(left), left[0]):
        left, right = right, left
    return left, right


def star_center(graph: Graph) -> int:
    if graph.n < 2 or not graph.is_tree():
        raise ApplicabilityError("graph is not a star")
    hubs = [v for v in range(graph.n) if graph.degree(v) == graph.n - 1]
    if not hubs:
        raise ApplicabilityError("graph is not a star")
    return hubs[0]


def mesh_shape(desc: Optional[TopologyDescriptor]) -> Tuple[int, int]:
    if desc is None or desc.family != 'mesh':
        raise ApplicabilityError("strategy needs a mesh topology descriptor")
    p, q = desc.params
    return int(p), int(q)


# ---------------------------------------------------------------------------
# Scripts for the simple families
# ---------------------------------------------------------------------------

def path_sweep(graph: Graph) -> MoveScript:
    """Leaf-to-leaf walk along a path."""
    ends = path_ends(graph)
    start = ends[0]
    walk = [start]
    while len(walk) < graph.n:
        nxt = [w for w in graph.adjacency[walk[-1]] if len(walk) < 2 or w != walk[-2]]
        walk.append(nxt[0])
    return MoveScript(start, tuple(walk[1:]))


def cycle_sweep(graph: Graph) -> MoveScript:
    """Two laps in a fixed direction."""
    order = cycle_order(graph)
    if graph.n < 4:
        raise ApplicabilityError(f"cycle sweep needs n >= 4, got {graph.n}")
    laps = [order[i % graph.n] for i in range(1, 2 * graph.n + 1)]
    return MoveScript(order[0], tuple(laps))


def complete_sequential(graph: Graph) -> MoveScript:
    if graph.edge_count != graph.n * (graph.n - 1) // 2:
        raise ApplicabilityError("graph is not complete")
    return MoveScript(0, tuple(range(1, graph.n)))


def bipartite_interleaved(graph: Graph) -> MoveScript:
    """a1 b1 a2 b2 ... am bm a1 b(m+1) ... bn."""
    side_a, side_b = bipartite_sides(graph)
    m = len(side_a)
    if m < 3:
        raise ApplicabilityError(f"interleaved sweep needs a smaller side of at least 3, got {m}")
    walk = []
    for k, b in enumerate(side_b):
        walk.extend((side_a[k % m], b))
    return MoveScript(walk[0], tuple(walk[1:]))


def star_shuttle(graph: Graph) -> MoveScript:
    center = star_center(graph)
    walk = []
    for leaf in graph.adjacency[center]:
        walk.extend((leaf, center))
    return MoveScript(center, tuple(walk[:-1]))


def _mesh_walk(p: int, q: int) -> Tuple[Callable[[int, int], int], int, int]:
    """Vertex lookup in the orientation with at most as many rows as columns."""
    if p <= q:
        return (lambda c, r: mesh_vertex(p, c, r)), p, q
    return (lambda c, r: mesh_vertex(p, r, c)), q, p


def mesh_column_sweep(p: int, q: int) -> MoveScript:
    """Column-by-column zig-zag; columns are declared clean as the walk leaves them.

    ``metadata['declared']`` lists (column vertices, tick) pairs.
    """
    vertex, rows, cols = _mesh_walk(p, q)
    if rows == 1:
        return MoveScript(vertex(1, 1), tuple(vertex(c, 1) for c in range(2, cols + 1)),
                          {'declared': ()})

    turn = math.ceil(rows / 2) + 1
    walk = [vertex(1, 1)]
    declared = []
    for c in range(1, cols):
        if c > 1:
            walk.append(vertex(c, 1))
        walk.extend(vertex(c, r) for r in range(2, rows + 1))
        walk.extend(vertex(c + 1, r) for r in range(rows, turn - 1, -1))
        walk.extend(vertex(c, r) for r in range(turn, 0, -1))
        declared.append((tuple(vertex(c, r) for r in range(1, rows + 1)), len(walk) - 1))
    walk.append(vertex(cols, 1))
    walk.extend(vertex(cols, r) for r in range(2, rows + 1))
    return MoveScript(walk[0], tuple(walk[1:]), {'declared': tuple(declared)})


def mesh_snake(p: int, q: int) -> MoveScript:
    """Boustrophedon over the columns of the short side; monotone."""
    vertex, rows, cols = _mesh_walk(p, q)
    walk = []
    for c in range(1, cols + 1):
        order = range(1, rows + 1) if c % 2 else range(rows, 0, -1)
        walk.extend(vertex(c, r) for r in order)
    return MoveScript(walk[0], tuple(walk[1:]))


def generic_dfs(graph: Graph) -> MoveScript:
    """Closed DFS walk over a depth-first spanning tree from vertex 0."""
    tour = euler_tour(dfs_tree(graph, 0))
    return MoveScript(tour[0], tuple(tour[1:]))


def generic_terminal(graph: Graph) -> ProgramPilot:
    """Extend a path to fresh neighbours; at a dead end delete it, walk back to the start and return."""

    def program(pilot: ProgramPilot) -> Iterator[int]:
        path = [0]
        on_path = {0}
        deleted = set()
        while True:
            here = path[-1]
            fresh = [w for w in graph.adjacency[here] if w not in on_path and w not in deleted]
            if fresh:
                path.append(fresh[0])
                on_path.add(fresh[0])
                yield fresh[0]
                continue
            if len(path) == 1:
                return
            deleted.add(here)
            on_path.discard(here)
            path.pop()
            pilot.notes['terminals'] = pilot.notes.get('terminals', 0) + 1
            yield from reversed(path)
            yield from path[1:]

    return ProgramPilot('terminal', 0, program)


def kahn_star_tau(arm_count: int) -> int:
    """Tau the fan sweep needs: 2 for four arms, 4 once middle fans appear."""
    return 2 if arm_count == 4 else 4


def kahn_star_script(arm_count: int, long_length: int) -> MoveScript:
    """Fan-by-fan sweep of G* for an even number of arms.

    Long arm z1..zL and its short partner x form a fan. The first fan is
    swept inwards alternating with x, ending on the root. Middle fans are
    swept outwards with a root round trip after every long-arm vertex, so
    the root never stays away longer than x, z, x. The last fan is swept
    outwards without returning.
    """
    if arm_count < 4 or arm_count % 2:
        raise ApplicabilityError(f"the fan sweep needs an even arm count >= 4, got {arm_count}")
    fans = []
    for pair in range(arm_count // 2):
        first = 1 + pair * (long_length + 1)
        fans.append((list(range(first, first + long_length)), first + long_length))

    long_arm, x = fans[0]
    walk = []
    for z in reversed(long_arm):
        walk.extend((x, z))
    walk.append(0)

    for long_arm, x in fans[1:-1]:
        walk.extend((long_arm[0], x, 0))
        for z in long_arm[1:]:
            walk.extend((x, z, x, 0))

    long_arm, x = fans[-1]
    for z in long_arm:
        walk.extend((z, x))
    return MoveScript(walk[0], tuple(walk[1:]))


# ---------------------------------------------------------------------------
# Registrations
# ---------------------------------------------------------------------------

@register('path-sweep', STRICT, True, lambda g, d, o: 0, 'leaf-to-leaf sweep of a path')
def _path_sweep(graph, desc, tau, options):
    return script_pilot(path_sweep(graph), 'path-sweep')


@register('cycle-sweep', STRICT, False, lambda g, d, o: 2, 'two laps around a cycle in one direction')
def _cycle_sweep(graph, desc, tau, options):
    return script_pilot(cycle_sweep(graph), 'cycle-sweep')


@register('complete-seq', STRICT, True, lambda g, d, o: g.n - 1, 'visit every vertex of K_n once')
def _complete_seq(graph, desc, tau, options):
    return script_pilot(complete_sequential(graph), 'complete-seq')


def _bipartite_tau(graph, desc, options):
    side_a, _ = bipartite_sides(graph)
    return 2 * len(side_a) - 1


@register('bipartite-interleave', LENIENT, True, _bipartite_tau, 'interleave the small side with the large side')
def _bipartite(graph, desc, tau, options):
    return script_pilot(bipartite_interleaved(graph), 'bipartite-interleave')


@register('star-shuttle', LENIENT, True, lambda g, d, o: 1, 'shuttle between the center and each leaf')
def _star(graph, desc, tau, options):
    return script_pilot(star_shuttle(graph), 'star-shuttle')


def _mesh_tau(graph, desc, options):
    p, q = mesh_shape(desc)
    return 0 if min(p, q) == 1 else min(p, q)


def _mesh_snake_tau(graph, desc, options):
    p, q = mesh_shape(desc)
    return 2 * min(p, q) - 1


@register('mesh-column', STRICT, False, _mesh_tau, 'column zig-zag with per-column declaration')
def _mesh_column(graph, desc, tau, options):
    p, q = mesh_shape(desc)
    script = mesh_column_sweep(p, q)
    pilot = script_pilot(script, 'mesh-column')
    pilot.notes.update(script.metadata)
    return pilot


@register('mesh-snake', STRICT, True, _mesh_snake_tau, 'boustrophedon sweep along the short side')
def _mesh_snake(graph, desc, tau, options):
    p, q = mesh_shape(desc)
    return script_pilot(mesh_snake(p, q), 'mesh-snake')


@register('dfs', STRICT, True, lambda g, d, o: 2 * (g.n - 1), 'closed DFS walk of a spanning tree')
def _dfs(graph, desc, tau, options):
    return script_pilot(generic_dfs(graph), 'dfs')


@register('terminal', STRICT, None, lambda g, d, o: g.n - 1, 'path extension with terminal-vertex returns')
def _terminal(graph, desc, tau, options):
    return generic_terminal(graph)


def _kahn_tau(graph, desc, options):
    if desc is None or desc.family != 'kahn_pair':
        return 2
    return kahn_star_tau(int(desc.params[0]))


@register('kahn-star', STRICT, True, _kahn_tau, 'fan sweep of the augmented alternating spider')
def _kahn_star(graph, desc, tau, options):
    if desc is None or desc.family != 'kahn_pair':
        raise ApplicabilityError("kahn-star needs a kahn_pair topology descriptor")
    arm_count, long_length = int(desc.params[0]), int(desc.params[1])
    if kahn_pair(arm_count, long_length)[1] != graph:
        raise ApplicabilityError("kahn-star runs on the augmented graph G* only")
    return script_pilot(kahn_star_script(arm_count, long_length), 'kahn-star')
