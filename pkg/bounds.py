"""
Bounds table: one row per topology line of the summary of results.

Each row instantiates its topology at a desk-scale size taken from the
``bounds`` section of the configuration, runs the strategy that proves the
upper bound at that strategy's own tau, and asks the exact oracle for
iota(G) when the instance is small enough.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Optional

from config_loader import Config
from dynamics import SemanticVariant, default_tick_budget
from errors import InvariantError, ResourceError
from graph_core import Graph, TopologyDescriptor, build_graph
from oracle import OracleResult, immunity_number
from strategies import get_strategy, kahn_star_tau, simulate
from tree_strategies import default_root, spider_arms, spider_tau


ValueFormula = Callable[[Graph, TopologyDescriptor], Optional[int]]


@dataclass(frozen=True)
class RowPlan:
    """What to build and run for one table line."""

    label: str
    desc: TopologyDescriptor
    strategy: str
    upper: str
    lower: str
    upper_value: Optional[ValueFormula] = None
    lower_value: Optional[ValueFormula] = None
    options: tuple = ()


@dataclass
class BoundsRow:
    label: str
    topology: str
    n: int
    strategy: str
    variant: str
    upper: str
    upper_value: Optional[int]
    lower: str
    lower_value: Optional[int]
    tau: int
    success: bool
    ticks: int
    monotone: bool
    iota: Optional[int] = None
    oracle: str = 'skipped'
    strict_iota: Optional[int] = None

    def check(self):
        """A measured success at tau means iota <= tau."""
        if self.success and self.iota is not None and self.tau < self.iota:
            raise InvariantError(
                f"{self.label}: {self.strategy} succeeded at tau={self.tau} below the oracle's iota={self.iota}"
            )

    def as_dict(self) -> Dict[str, Any]:
        """Flat record for the TSV and JSON writers ('?' for unknown values)."""
        record = asdict(self)
        for key in ('upper_value', 'lower_value', 'iota', 'strict_iota'):
            if record[key] is None:
                record[key] = '?'
        record['success'] = str(self.success).lower()
        record['monotone'] = str(self.monotone).lower()
        return record

    def summary(self) -> str:
        iota = '?' if self.iota is None else self.iota
        strict_iota = '?' if self.strict_iota is None else self.strict_iota
        result = 'fully_clean' if self.success else 'budget_exhausted'
        return (f"{self.label}: upper={self.upper} lower={self.lower} tau={self.tau} result={result} "
                f"iota={iota} strict_iota={strict_iota}")


def _constant(value: int) -> ValueFormula:
    return lambda graph, desc: value


def _mesh_side(graph: Graph, desc: TopologyDescriptor) -> int:
    return min(desc.params)


def plan_rows(bounds: Dict[str, Any], seed: int = 7, alpha: float = 3.0) -> List[RowPlan]:
    """Table lines at the sizes named in the bounds configuration."""
    n_path = bounds.get('path_n', 6)
    n_cycle = bounds.get('cycle_n', 6)
    n_complete = bounds.get('complete_n', 5)
    m, n_right = sorted((bounds.get('bipartite_m', 3), bounds.get('bipartite_n', 3)))
    arms = tuple(bounds.get('spider_arms', [5, 5, 4]))
    k, h = bounds.get('kary_k', 2), bounds.get('kary_h', 3)
    binary_h = bounds.get('binary_h', 4)
    p, q = bounds.get('mesh_p', 3), bounds.get('mesh_q', 3)
    graph_n = bounds.get('graph_n', 30)
    extra_p = bounds.get('graph_extra_edge_p', 0.1)
    mesh = TopologyDescriptor('mesh', (p, q))
    general = TopologyDescriptor('random_connected', (graph_n, extra_p, seed))

    return [
        RowPlan('Path P_n', TopologyDescriptor('path', (n_path,)), 'path-sweep',
                '0', '0', _constant(0), _constant(0)),
        RowPlan('Cycle C_n', TopologyDescriptor('cycle', (n_cycle,)), 'cycle-sweep',
                '2', '2', _constant(2), _constant(2)),
        RowPlan('Complete graph K_n', TopologyDescriptor('complete', (n_complete,)), 'complete-seq',
                'n-1', 'n-1', _constant(n_complete - 1), _constant(n_complete - 1)),
        RowPlan('Complete bipartite K_{m,n}', TopologyDescriptor('complete_bipartite', (m, n_right)),
                'bipartite-interleave', '2m-1 (lenient)', '2(m-1) (strict)',
                _constant(2 * m - 1), _constant(2 * (m - 1))),
        RowPlan('Star S_n', TopologyDescriptor('star', (bounds.get('star_leaves', 5),)), 'star-shuttle',
                '1', '1', _constant(1), _constant(1)),
        RowPlan('Spider (arm iteration)', TopologyDescriptor('spider', arms), 'spider-iter',
                'ceil(D+sqrt(D^2+4m))', '-',
                lambda graph, desc: spider_tau(len(arms), max(arms))),
        RowPlan('Spider on n+1 vertices', TopologyDescriptor('spider', arms), 'spider-sqrt',
                '4*sqrt(n)', '-', lambda graph, desc: math.ceil(4 * math.sqrt(graph.n - 1))),
        RowPlan('k-ary tree of height h', TopologyDescriptor('kary_tree', (k, h)), 'kary-inorder',
                '2h-1', '-', _constant(max(0, 2 * h - 1))),
        RowPlan('Binary tree of height h', TopologyDescriptor('kary_tree', (2, binary_h)), 'binary-2phase',
                '2h-3', '-', _constant(max(0, 2 * binary_h - 3))),
        RowPlan('Mesh p x q', mesh, 'mesh-column', 'p', '> p/2',
                _mesh_side, lambda graph, desc: _mesh_side(graph, desc) // 2 + 1),
        RowPlan('Tree of height h', TopologyDescriptor('random_tree', (bounds.get('small_height_n', 200), seed)),
                'tree-smallh', 'alpha*h', '-',
                lambda graph, desc: math.ceil(alpha * default_root(graph, desc).height),
                options=(('alpha', alpha),)),
        RowPlan('Tree on n vertices', TopologyDescriptor('random_tree', (bounds.get('tree_n', 400), seed)),
                'tree-sqrt', '30*sqrt(n)', '-', lambda graph, desc: math.ceil(30 * math.sqrt(graph.n))),
        RowPlan('Planar graph', mesh, 'terminal', 'n-1', 'Omega(sqrt(n))', lambda graph, desc: graph.n - 1),
        RowPlan('General graph (closed DFS)', general, 'dfs', '2(n-1)', 'n-1 (K_n)',
                lambda graph, desc: 2 * (graph.n - 1)),
        RowPlan('General graph', general, 'terminal', 'n-1', 'n-1 (K_n)', lambda graph, desc: graph.n - 1),
        RowPlan('Kahn pair G*', TopologyDescriptor('kahn_pair', (bounds.get('kahn_arms', 4), bounds.get('kahn_long', 3))),
                'kahn-star', '2 (4 arms), 4 (more)', '-', _constant(kahn_star_tau(bounds.get('kahn_arms', 4)))),
    ]


def build_row(plan: RowPlan, config: Config) -> BoundsRow:
    """Build the graph, run the strategy at its own tau, then try the oracle."""
    bounds = config.get_bounds_config()
    options = dict(plan.options)
    graph = build_graph(plan.desc)
    strategy = get_strategy(plan.strategy)
    variant = SemanticVariant(strategy.variant)
    tau = strategy.claimed_tau(graph, plan.desc, **options)
    budget = default_tick_budget(graph, tau, config.tick_budget_factor)
    outcome, _, _ = simulate(graph, plan.strategy, tau, variant, plan.desc, budget, **options)

    row = BoundsRow(
        label=plan.label,
        topology=plan.desc.label(),
        n=graph.n,
        strategy=plan.strategy,
        variant=variant.label(),
        upper=plan.upper,
        upper_value=plan.upper_value(graph, plan.desc) if plan.upper_value else None,
        lower=plan.lower,
        lower_value=plan.lower_value(graph, plan.desc) if plan.lower_value else None,
        tau=tau,
        success=outcome.success,
        ticks=outcome.ticks_used,
        monotone=outcome.monotone,
    )

    if not bounds.get('oracle_enabled', True):
        return row
    if graph.n > bounds.get('oracle_max_vertices', 10):
        row.oracle = 'too_large'
        return row

    tau_max = tau if outcome.success else None
    try:
        result = _oracle(graph, variant, tau_max, config)
    except ResourceError:
        row.oracle = 'resource_limit'
        return row

    if result.iota is None:
        row.oracle = 'not_found'
        return row
    row.iota = result.iota
    row.oracle = 'exact'
    row.check()

    if variant.rule == 'strict':
        row.strict_iota = row.iota
        return row
    # a lenient walk at tau is a strict walk at tau + 1
    try:
        strict = _oracle(graph, SemanticVariant('strict', variant.allow_stay),
                         None if tau_max is None else tau_max + 1, config)
    except ResourceError:
        return row
    row.strict_iota = strict.iota
    return row


def _oracle(graph: Graph, variant: SemanticVariant, tau_max: Optional[int], config: Config) -> OracleResult:
    return immunity_number(
        graph, variant,
        tau_max=tau_max,
        verify_above=config.verify_above,
        state_budget=config.state_budget,
        max_explored=config.max_explored,
    )


def build_bounds_rows(config: Config,
                      on_row: Optional[Callable[[RowPlan, int, int], None]] = None) -> List[BoundsRow]:
    """Every table line in order; on_row(plan, index, total) runs before each one."""
    plans = plan_rows(config.get_bounds_config(), config.seed, config.small_height_alpha)
    rows = []
    for index, plan in enumerate(plans):
        if on_row:
            on_row(plan, index, len(plans))
        rows.append(build_row(plan, config))
    return rows
