#!/usr/bin/env python3
"""
Temporal Immunity Toolkit - Main CLI Interface

Generate topologies, run decontamination strategies, compute exact immunity
numbers, check the mesh matching bound and print the bounds table.
"""

import sys
import argparse
from typing import List, Optional, Tuple

from rich.console import Console
from rich.markup import escape
from rich.progress import Progress, SpinnerColumn, TextColumn, BarColumn, TaskProgressColumn
from rich.panel import Panel
from rich.table import Table

from bounds import build_bounds_rows
from config_loader import Config, load_config
from csv_report import write_tsv
from dynamics import RULES, SemanticVariant, default_tick_budget, write_trace
from errors import ImmunityError, ParameterError
from graph_core import Graph, TopologyDescriptor, build_graph, center_and_metrics, format_edge_list, \
    parse_topology, write_edge_list
from matching import EXHAUSTIVE_MAX_SIDE, LemmaReport, verify_lemma
from oracle import check_witness, cross_check, immunity_number
from report_generator import generate_all_reports
from strategies import catalog, compile_script, get_strategy, simulate


console = Console()

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EXHAUSTED = 2
EXIT_INTERRUPTED = 130


def emit(line: str):
    """Machine-readable output line, never wrapped or styled."""
    console.print(line, markup=False, highlight=False, soft_wrap=True)


def tau_argument(text: str) -> Optional[int]:
    """'paper' (the strategy's own formula) or a non-negative integer."""
    if text == 'paper':
        return None
    try:
        tau = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tau must be an integer or 'paper', got '{text}'")
    if tau < 0:
        raise argparse.ArgumentTypeError(f"tau must be non-negative, got {tau}")
    return tau


def resolve_topology(text: str, seed: int) -> TopologyDescriptor:
    """Parse a topology string, appending the seed to random families that omit it."""
    desc = parse_topology(text)
    if desc.family == 'random_tree' and len(desc.params) == 1:
        return TopologyDescriptor(desc.family, desc.params + (seed,))
    if desc.family == 'random_connected' and len(desc.params) == 2:
        return TopologyDescriptor(desc.family, desc.params + (seed,))
    return desc


def load_graph(args, config: Config) -> Tuple[TopologyDescriptor, Graph]:
    if args.edges:
        desc = TopologyDescriptor('edge_list_file', (args.edges,))
    else:
        desc = resolve_topology(args.topo, config.seed)
    return desc, build_graph(desc)


def setup_argparse() -> argparse.ArgumentParser:
    """Setup command-line argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='Path to configuration file')
    common.add_argument('--preset', type=str, choices=['quick', 'full'], help='Use a configuration preset')
    common.add_argument('--format', choices=['text', 'tsv'], default='text',
                        help='Output format (default: text)')
    common.add_argument('--seed', type=int, help='Seed for random topologies and sampling')
    common.add_argument('--quiet', '-q', action='store_true', help='Minimal output')
    common.add_argument('--verbose', '-v', action='store_true', help='Verbose output')

    graph_args = argparse.ArgumentParser(add_help=False)
    source = graph_args.add_mutually_exclusive_group(required=True)
    source.add_argument('--topo', type=str, help="Topology, e.g. 'cycle:7', 'mesh:4,6', 'spider:2,2,2'")
    source.add_argument('--edges', type=str, help='Edge-list file')
    graph_args.add_argument('--variant', choices=RULES, help='Recontamination rule')
    graph_args.add_argument('--allow-stay', action='store_true', help='Let the agent wait in place')

    parser = argparse.ArgumentParser(
        description='Temporal Immunity Toolkit - single-agent graph decontamination experiments',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Two laps around a 7-cycle at the strategy's own tau
  %(prog)s simulate --topo cycle:7 --strategy cycle-sweep --tau paper

  # Column sweep of a 4x6 mesh with a trace file
  %(prog)s simulate --topo mesh:4,6 --strategy mesh-column --tau 4 --trace mesh.trace

  # Exact immunity number of K_{3,4} under the lenient rule
  %(prog)s oracle --topo complete_bipartite:3,4 --variant lenient

  # Exhaustive matching check on the 4x4 mesh
  %(prog)s verify-matching --side 4

  # Bounds table as tab-separated values
  %(prog)s bounds-table --preset quick --format tsv
        """
    )
    commands = parser.add_subparsers(dest='command', required=True)

    generate = commands.add_parser('generate', parents=[common], help='Write a topology as an edge list')
    generate.add_argument('--topo', type=str, required=True, help='Topology descriptor')
    generate.add_argument('--output', '-o', type=str, help='Edge-list file (default: stdout)')

    sim = commands.add_parser('simulate', parents=[common, graph_args], help='Run a strategy')
    sim.add_argument('--strategy', type=str, required=True,
                     help=f"Strategy name ({', '.join(sorted(catalog()))})")
    sim.add_argument('--tau', type=tau_argument, default=None,
                     help="Temporal immunity, or 'paper' for the strategy's formula (default: paper)")
    sim.add_argument('--budget', type=int, help='Tick budget (default: factor * n * (tau + 2))')
    sim.add_argument('--alpha', type=float, help='Block factor for tree-smallh and tree-euler')
    sim.add_argument('--trace', type=str, help='Write the per-tick trace here')
    sim.add_argument('--script-out', type=str, help='Write the move script here')

    orc = commands.add_parser('oracle', parents=[common, graph_args], help='Exact immunity number')
    orc.add_argument('--tau-max', type=int, help='Largest tau to scan (default: 2(n-1))')
    orc.add_argument('--state-budget', type=int, help='Refuse searches with more packed configurations')
    orc.add_argument('--max-explored', type=int, help='Stop after visiting this many configurations')
    orc.add_argument('--witness', type=str, help='Write the witness move script here')
    orc.add_argument('--strategy', type=str, help="Compare with this strategy's tau")

    match = commands.add_parser('verify-matching', parents=[common], help='Check the mesh cut-matching bound')
    match.add_argument('--side', type=int, default=4, help='Mesh side s (even, default: 4)')
    match.add_argument('--mode', choices=['exhaustive', 'sampled'],
                       help=f'Enumeration mode (default: exhaustive up to side {EXHAUSTIVE_MAX_SIDE})')
    match.add_argument('--samples', type=int, help='Subsets drawn in sampled mode')

    table = commands.add_parser('bounds-table', parents=[common], help='Bounds table with measurements')
    table.add_argument('--no-oracle', action='store_true', help='Skip the exact oracle')
    table.add_argument('--output-dir', '-o', type=str, help='Also write JSON, TSV and text reports here')

    return parser


def apply_overrides(args, config: Config):
    """Apply CLI overrides to the loaded configuration."""
    if args.seed is not None:
        config.set('generation', 'seed', args.seed)
        config.set('matching', 'seed', args.seed)
    if args.quiet:
        config.set('oracle', 'show_progress', False)
    if getattr(args, 'allow_stay', False):
        config.set('simulation', 'allow_stay', True)
    if getattr(args, 'variant', None):
        config.set('simulation', 'variant', args.variant)
    if getattr(args, 'alpha', None) is not None:
        config.set('strategies', 'small_height_alpha', args.alpha)
    if getattr(args, 'state_budget', None):
        config.set('oracle', 'state_budget', args.state_budget)
    if getattr(args, 'max_explored', None):
        config.set('oracle', 'max_explored', args.max_explored)
    if getattr(args, 'samples', None):
        config.set('matching', 'samples', args.samples)
    if getattr(args, 'no_oracle', False):
        config.set('bounds', 'oracle_enabled', False)


def show_parameters(title: str, rows: List[Tuple[str, object]]):
    config_table = Table(title=title, show_header=True)
    config_table.add_column("Parameter", style="cyan")
    config_table.add_column("Value", style="green")
    for name, value in rows:
        config_table.add_row(name, str(value))
    console.print(config_table)
    console.print()


def cmd_generate(args, config: Config) -> int:
    desc = resolve_topology(args.topo, config.seed)
    graph = build_graph(desc)

    if args.output:
        write_edge_list(graph, args.output)
    else:
        for line in format_edge_list(graph).splitlines():
            emit(line)

    if not args.quiet:
        metrics = center_and_metrics(graph)
        show_parameters("Topology", [
            ("Descriptor", desc.label()),
            ("Vertices", graph.n),
            ("Edges", graph.edge_count),
            ("Digest", graph.digest()),
            ("Radius", metrics.radius),
            ("Diameter", metrics.diameter),
            ("Center", ', '.join(str(v) for v in metrics.center)),
        ])
    return EXIT_OK


def cmd_simulate(args, config: Config) -> int:
    desc, graph = load_graph(args, config)
    strategy = get_strategy(args.strategy)
    options = {'alpha': config.small_height_alpha}
    tau = strategy.claimed_tau(graph, desc, **options) if args.tau is None else args.tau
    if tau < 0:
        raise ParameterError(f"tau must be non-negative, got {tau}")

    variant = SemanticVariant(config.configured_variant or strategy.variant, config.allow_stay)
    budget = args.budget if args.budget is not None else default_tick_budget(graph, tau, config.tick_budget_factor)

    if not args.quiet:
        show_parameters("Run Configuration", [
            ("Topology", desc.label()),
            ("Vertices / Edges", f"{graph.n} / {graph.edge_count}"),
            ("Strategy", f"{strategy.name} ({strategy.summary})"),
            ("Tau", f"{tau} (claimed)" if args.tau is None else tau),
            ("Variant", variant.label()),
            ("Tick Budget", budget),
        ])

    outcome, trace, pilot = simulate(graph, strategy.name, tau, variant, desc, budget, **options)

    if args.trace:
        write_trace(trace, args.trace)
    if args.script_out:
        compile_script(trace).write(args.script_out)

    if not args.quiet:
        result_table = Table(title="Run Result", show_header=True)
        result_table.add_column("Measure", style="cyan")
        result_table.add_column("Value", style="green")
        result_table.add_row("Peak clean vertices", f"{outcome.peak_clean} / {graph.n}")
        result_table.add_row("Recontaminations", str(trace.recontaminations()))
        result_table.add_row("Max exposure", str(outcome.max_exposure))
        for key, value in sorted(getattr(pilot, 'notes', {}).items()):
            if isinstance(value, (int, float, str)):
                result_table.add_row(key, str(value))
        console.print(result_table)

    emit(f"result={outcome.verdict} ticks={outcome.ticks_used} "
         f"monotone={str(outcome.monotone).lower()} tau={tau}")
    return EXIT_OK if outcome.success else EXIT_EXHAUSTED


def cmd_oracle(args, config: Config) -> int:
    desc, graph = load_graph(args, config)
    variant = SemanticVariant(config.variant, config.allow_stay)
    oracle_options = dict(
        verify_above=config.verify_above,
        state_budget=config.state_budget,
        max_explored=config.max_explored,
        show_progress=config.show_progress,
    )

    if not args.quiet:
        show_parameters("Oracle Configuration", [
            ("Topology", desc.label()),
            ("Vertices", graph.n),
            ("Variant", variant.label()),
            ("State Budget", config.state_budget),
            ("Max Explored", config.max_explored),
        ])
        console.print(Panel.fit("Searching configuration space", style="bold blue"))

    result = immunity_number(graph, variant, tau_max=args.tau_max, **oracle_options)

    if args.format == 'tsv':
        emit("tau\tfeasible\tstates")
        for row in result.table:
            emit(f"{row.tau}\t{str(row.feasible).lower()}\t{row.states}")
    else:
        for line in result.lines():
            emit(line)

    if result.witness is not None:
        if args.witness:
            result.witness.write(args.witness)
        if not check_witness(graph, result):
            console.print("[red]Error: witness does not replay to a fully clean graph[/red]")
            return EXIT_ERROR

    if args.strategy and result.iota is not None:
        report = cross_check(graph, args.strategy, variant, desc, result=result)
        emit(f"strategy={report.strategy} claimed_tau={report.claimed_tau} iota={report.iota} "
             f"gap={report.gap} success={str(report.strategy_success).lower()}")

    if not args.quiet:
        console.print(f"[green]Explored {result.explored} configurations in {result.seconds:.2f}s[/green]")
    return EXIT_OK if result.iota is not None else EXIT_EXHAUSTED


def cmd_verify_matching(args, config: Config) -> int:
    mode = args.mode or ('exhaustive' if args.side <= EXHAUSTIVE_MAX_SIDE else 'sampled')
    if not args.quiet:
        show_parameters("Matching Check", [
            ("Mesh", f"{args.side} x {args.side}"),
            ("Mode", mode),
            ("Samples", config.samples if mode == 'sampled' else 'all'),
            ("Seed", config.matching_seed if mode == 'sampled' else '-'),
        ])

    report = verify_lemma(args.side, mode, config.samples, config.matching_seed,
                          show_progress=config.show_progress)
    for line in report.lines():
        emit(line)
    if not args.quiet and report.non_rectangular_examples:
        console.print("[yellow]Non-rectangular minimizers (first few):[/yellow]")
        for subset in report.non_rectangular_examples:
            console.print(f"  {', '.join(str(v) for v in subset)}")
    return EXIT_OK if report.passed else EXIT_EXHAUSTED


def matching_evidence(config: Config) -> LemmaReport:
    """The cut-matching check attached to written bounds reports."""
    side = config.matching_report_side
    mode = 'exhaustive' if side <= EXHAUSTIVE_MAX_SIDE else 'sampled'
    return verify_lemma(side, mode, config.samples, config.matching_seed, show_progress=config.show_progress)


def cmd_bounds_table(args, config: Config) -> int:
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
        transient=True,
        disable=args.quiet,
    ) as progress:
        task = progress.add_task("[cyan]Building rows...", total=None)

        def on_row(plan, index, total):
            progress.update(task, description=f"[cyan]{plan.label}", completed=index, total=total)

        rows = build_bounds_rows(config, on_row)

    if args.format == 'tsv':
        write_tsv(rows, sys.stdout)
    else:
        result_table = Table(title="Immunity Bounds", show_header=True)
        for column, style in [("Topology", "cyan"), ("Instance", "cyan"), ("Upper", "green"),
                              ("Lower", "green"), ("Strategy", "magenta"), ("Tau", "yellow"),
                              ("Result", "yellow"), ("Ticks", "yellow"), ("Iota", "bold"),
                              ("Strict Iota", "bold")]:
            result_table.add_column(column, style=style)
        for row in rows:
            upper = row.upper if row.upper_value is None else f"{row.upper} = {row.upper_value}"
            lower = row.lower if row.lower_value is None else f"{row.lower} = {row.lower_value}"
            result = "clean" if row.success else "exhausted"
            if row.success and row.monotone:
                result += " (monotone)"
            result_table.add_row(row.label, row.topology, upper, lower, f"{row.strategy} ({row.variant})",
                                 str(row.tau), result, str(row.ticks), '?' if row.iota is None else str(row.iota),
                                 '?' if row.strict_iota is None else str(row.strict_iota))
        console.print(result_table)

    if args.output_dir:
        generate_all_reports(rows, args.output_dir, [matching_evidence(config)], preset=args.preset)
        if not args.quiet:
            console.print(Panel.fit(
                f"[green]Reports written[/green]\n\nResults saved to: [cyan]{args.output_dir}[/cyan]",
                title="Success",
                border_style="green"
            ))
    return EXIT_OK if all(row.success for row in rows) else EXIT_EXHAUSTED


COMMANDS = {
    'generate': cmd_generate,
    'simulate': cmd_simulate,
    'oracle': cmd_oracle,
    'verify-matching': cmd_verify_matching,
    'bounds-table': cmd_bounds_table,
}


def run_command(args) -> int:
    """Load configuration, apply overrides and dispatch."""
    try:
        config = load_config(args.config, args.preset)
        apply_overrides(args, config)
        return COMMANDS[args.command](args, config)
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted by user[/yellow]")
        return EXIT_INTERRUPTED
    except (ImmunityError, ValueError, OSError) as e:
        console.print(f"[red]Error: {escape(str(e))}[/red]")
        if args.verbose:
            console.print_exception()
        return EXIT_ERROR
    except Exception as e:
        console.print(f"\n[red]Error during {args.command}: {escape(str(e))}[/red]")
        if args.verbose:
            console.print_exception()
        return EXIT_ERROR


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = setup_argparse()
    args = parser.parse_args(argv)
    return run_command(args)


if __name__ == "__main__":
    sys.exit(main())
