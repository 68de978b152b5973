"""
Cut matchings on square meshes.

For a half-sized vertex subset W of an s-by-s mesh, the maximum matching
between W and its complement over cut edges has at least s edges. This
module computes those matchings and checks the bound extensionally, over
every subset for small s or over seeded samples.
"""

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple

from tqdm import tqdm

from errors import ContractError, InvariantError, ResourceError
from graph_core import Graph, TopologyDescriptor, generate


EXHAUSTIVE_MAX_SIDE = 4

CutEdge = Tuple[int, int]


@lru_cache(maxsize=None)
def square_mesh(side: int) -> Graph:
    return generate(TopologyDescriptor('mesh', (side, side)))


@dataclass(frozen=True)
class CutInstance:
    """A half-sized subset W of the side-by-side mesh."""

    side: int
    subset: FrozenSet[int]

    def __post_init__(self):
        n = self.side * self.side
        if self.side < 1 or n % 2:
            raise ContractError(f"mesh side {self.side} gives an odd vertex count; W needs |V| even")
        if len(self.subset) != n // 2:
            raise ContractError(f"|W| must be {n // 2} on a {self.side}x{self.side} mesh, got {len(self.subset)}")
        if not all(0 <= v < n for v in self.subset):
            raise ContractError(f"W contains vertices outside 0..{n - 1}")

    @property
    def mesh(self) -> Graph:
        return square_mesh(self.side)

    def cut_edges(self) -> List[CutEdge]:
        """Edges (w, v) with w in W and v outside it."""
        adjacency = self.mesh.adjacency
        return [(w, v) for w in sorted(self.subset) for v in adjacency[w] if v not in self.subset]

    def is_rectangular(self) -> bool:
        cols = [v // self.side for v in self.subset]
        rows = [v % self.side for v in self.subset]
        area = (max(cols) - min(cols) + 1) * (max(rows) - min(rows) + 1)
        return area == len(self.subset)


@dataclass
class MatchingResult:
    size: int
    edges: List[CutEdge]


def _augment(w: int, options: Dict[int, List[int]], owner: Dict[int, int], seen: Set[int]) -> bool:
    for v in options[w]:
        if v in seen:
            continue
        seen.add(v)
        if v not in owner or _augment(owner[v], options, owner, seen):
            owner[v] = w
            return True
    return False


def max_cut_matching(instance: CutInstance) -> MatchingResult:
    """Maximum matching across the cut by repeated augmenting paths."""
    options: Dict[int, List[int]] = {w: [] for w in sorted(instance.subset)}
    for w, v in instance.cut_edges():
        options[w].append(v)

    owner: Dict[int, int] = {}
    for w in options:
        _augment(w, options, owner, set())

    matched = set(owner.values())
    for w in options:
        if w not in matched and _augment(w, options, dict(owner), set()):
            raise InvariantError(f"augmenting path from {w} survived the matching pass")

    edges = sorted((w, v) for v, w in owner.items())
    return MatchingResult(len(edges), edges)


def brute_force_matching(instance: CutInstance, max_edges: int = 12) -> int:
    """Largest set of pairwise disjoint cut edges, by trying every subset."""
    cut = instance.cut_edges()
    if len(cut) > max_edges:
        raise ResourceError(f"{len(cut)} cut edges exceed the brute-force limit of {max_edges}")
    for size in range(min(len(cut), len(instance.subset)), 0, -1):
        for chosen in combinations(cut, size):
            ends = [w for w, _ in chosen] + [v for _, v in chosen]
            if len(set(ends)) == 2 * size:
                return size
    return 0


@dataclass
class LemmaReport:
    side: int
    mode: str
    checked: int
    minimum: int
    worst: Tuple[int, ...]
    seed: Optional[int] = None
    minimizers: int = 0
    rectangular_minimizers: int = 0
    non_rectangular_examples: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.minimum >= self.side

    @property
    def non_rectangular_minimizers(self) -> int:
        return self.minimizers - self.rectangular_minimizers

    def lines(self) -> List[str]:
        evidence = 'exhaustive' if self.mode == 'exhaustive' else f'sampled (probabilistic evidence, seed={self.seed})'
        return [
            f"side={self.side}",
            f"mode={evidence}",
            f"subsets={self.checked}",
            f"minimum={self.minimum}",
            f"bound={self.side}",
            f"pass={str(self.passed).lower()}",
            f"worst_w={','.join(str(v) for v in self.worst)}",
            f"minimizers={self.minimizers}",
            f"rectangular_minimizers={self.rectangular_minimizers}",
            f"non_rectangular_minimizers={self.non_rectangular_minimizers}",
        ]


def colex_subsets(n: int, k: int) -> List[Tuple[int, ...]]:
    return sorted(combinations(range(n), k), key=lambda c: c[::-1])


def _subsets(side: int, mode: str, samples: int, seed: int) -> Iterator[Tuple[int, ...]]:
    n = side * side
    if mode == 'exhaustive':
        yield from colex_subsets(n, n // 2)
        return
    rng = random.Random(seed)
    for _ in range(samples):
        yield tuple(sorted(rng.sample(range(n), n // 2)))


def verify_lemma(side: int, mode: str = 'exhaustive', samples: int = 100_000, seed: int = 20240601,
                 show_progress: bool = False, keep_examples: int = 5) -> LemmaReport:
    """Minimum cut matching over all (or sampled) half-sized subsets."""
    if mode not in ('exhaustive', 'sampled'):
        raise ContractError(f"mode must be 'exhaustive' or 'sampled', got '{mode}'")
    if side < 2 or side % 2:
        raise ContractError(f"the matching check needs an even mesh side, got {side}")
    if mode == 'exhaustive' and side > EXHAUSTIVE_MAX_SIDE:
        raise ResourceError(f"exhaustive enumeration is limited to side <= {EXHAUSTIVE_MAX_SIDE}, got {side}")

    n = side * side
    total = samples if mode == 'sampled' else math.comb(n, n // 2)
    report: Optional[LemmaReport] = None
    for subset in tqdm(_subsets(side, mode, samples, seed), desc=f"side={side}", unit=" subsets",
                       total=total, disable=not show_progress, leave=False):
        instance = CutInstance(side, frozenset(subset))
        size = max_cut_matching(instance).size
        if report is None:
            report = LemmaReport(side, mode, 0, size, subset, seed if mode == 'sampled' else None)
        report.checked += 1
        if size < report.minimum:
            report.minimum, report.worst = size, subset
            report.minimizers = report.rectangular_minimizers = 0
            report.non_rectangular_examples = []
        if size == report.minimum:
            report.minimizers += 1
            if instance.is_rectangular():
                report.rectangular_minimizers += 1
            elif len(report.non_rectangular_examples) < keep_examples:
                report.non_rectangular_examples.append(subset)

    if report is None:
        raise ContractError("no subsets were checked")
    return report
