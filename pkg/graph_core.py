"""
Graph representation, topology generators and structural metrics.

Vertices are dense integers 0..n-1. Every generator documents its layout:

- path / cycle / complete: 0..n-1 in walk order.
- complete_bipartite(m, n): side A is 0..m-1, side B is m..m+n-1.
- star(n): center 0, leaves 1..n (n leaves, n+1 vertices).
- spider(arms): root 0, then each arm in the given order, listed outward.
- kary_tree(k, h): breadth-first numbering from root 0.
- mesh(p, q) / cylinder(p, q): p rows, q columns; vertex in column i
  (1..q), row j (1..p) is (i-1)*p + (j-1).
- kahn_pair(a, L): spider with a arms alternating lengths L, 1, L, 1, ...
"""

import hashlib
import random
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx

from errors import ParameterError, StructureError


Edge = Tuple[int, int]

FAMILIES = (
    'path', 'cycle', 'complete', 'complete_bipartite', 'star', 'spider',
    'kary_tree', 'mesh', 'cylinder', 'random_tree', 'random_connected',
    'kahn_pair', 'edge_list_file',
)


@dataclass(frozen=True)
class Graph:
    """Immutable, connected, simple undirected graph."""

    n: int
    edges: frozenset
    adjacency: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise StructureError(f"graph needs at least one vertex, got n={self.n}")

        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise StructureError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise StructureError(f"edge ({u}, {v}) outside vertex range 0..{self.n - 1}")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, 'edges', frozenset(normalized))

        neighbors: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in normalized:
            neighbors[u].append(v)
            neighbors[v].append(u)
        object.__setattr__(self, 'adjacency', tuple(tuple(sorted(ns)) for ns in neighbors))

        if not is_connected(self):
            raise StructureError(f"graph with n={self.n} is not connected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> 'Graph':
        return cls(n, frozenset(tuple(e) for e in edges))

    @classmethod
    def from_networkx(cls, nx_graph: nx.Graph) -> 'Graph':
        """Convert a networkx graph; nodes are relabelled 0..n-1 in sorted order."""
        nodes = sorted(nx_graph.nodes())
        if nodes != list(range(len(nodes))):
            nx_graph = nx.convert_node_labels_to_integers(nx_graph, ordering='sorted')
        return cls.from_edges(nx_graph.number_of_nodes(), nx_graph.edges())

    def to_networkx(self) -> nx.Graph:
        """networkx copy whose neighbour dicts iterate in ascending id order."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from((u, v) for u in range(self.n) for v in self.adjacency[u])
        return g

    @cached_property
    def nx_view(self) -> nx.Graph:
        return nx.freeze(self.to_networkx())

    @cached_property
    def neighbor_sets(self) -> Tuple[frozenset, ...]:
        return tuple(frozenset(ns) for ns in self.adjacency)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_degree(self) -> int:
        return max(len(ns) for ns in self.adjacency)

    @property
    def min_degree(self) -> int:
        return min(len(ns) for ns in self.adjacency)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def digest(self) -> str:
        """Stable short hash of the canonical edge list."""
        text = format_edge_list(self)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()[:16]


class GraphMetrics(NamedTuple):
    radius: int
    diameter: int
    center: List[int]
    eccentricity: List[int]


@dataclass(frozen=True)
class TopologyDescriptor:
    """A graph family tag plus its parameters."""

    family: str
    params: Tuple = ()

    def label(self) -> str:
        if not self.params:
            return self.family
        return f"{self.family}:{','.join(str(p) for p in self.params)}"


@dataclass(frozen=True)
class TreeView:
    """A rooted view of a tree (or of a depth-truncated part of one)."""

    graph: Graph
    root: int
    parent: Dict[int, Optional[int]]
    depth: Dict[int, int]
    children: Dict[int, Tuple[int, ...]]

    @property
    def height(self) -> int:
        return max(self.depth.values())

    @property
    def size(self) -> int:
        return len(self.depth)

    @property
    def vertices(self) -> List[int]:
        return sorted(self.depth)

    def path_from_root(self, v: int) -> List[int]:
        """Vertices from the root down to v, both included."""
        path = [v]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path

    def subtree_sizes(self) -> Dict[int, int]:
        sizes = {v: 1 for v in self.depth}
        for v in sorted(self.depth, key=self.depth.get, reverse=True):
            p = self.parent[v]
            if p is not None:
                sizes[p] += sizes[v]
        return sizes


# ---------------------------------------------------------------------------
# Distances and metrics
# ---------------------------------------------------------------------------

def bfs_distances(graph: Graph, source: int, limit: Optional[int] = None) -> List[int]:
    """Hop distances from source; -1 for unreachable (or beyond limit)."""
    dist = [-1] * graph.n
    for v, d in nx.single_source_shortest_path_length(graph.nx_view, source, cutoff=limit).items():
        dist[v] = d
    return dist


def is_connected(graph: Graph) -> bool:
    return nx.is_connected(graph.nx_view)


def center_and_metrics(graph: Graph) -> GraphMetrics:
    """Radius, diameter, center list and eccentricities by all-pairs BFS."""
    eccentricity = []
    for v in range(graph.n):
        dist = bfs_distances(graph, v)
        if min(dist) < 0:
            raise StructureError("metrics need a connected graph")
        eccentricity.append(max(dist))

    radius = min(eccentricity)
    return GraphMetrics(
        radius=radius,
        diameter=max(eccentricity),
        center=[v for v, e in enumerate(eccentricity) if e == radius],
        eccentricity=eccentricity,
    )


def shortest_path(graph: Graph, source: int, target: int) -> List[int]:
    """A shortest vertex path from source to target."""
    try:
        return nx.shortest_path(graph.nx_view, source, target)
    except nx.NetworkXNoPath:
        raise StructureError(f"no path from {source} to {target}")


# ---------------------------------------------------------------------------
# Rooted trees
# ---------------------------------------------------------------------------

def tree_center(graph: Graph) -> int:
    """Lower-id center of a tree, from the middle of a longest path."""
    dist = bfs_distances(graph, 0)
    a = dist.index(max(dist))
    dist_a = bfs_distances(graph, a)
    b = dist_a.index(max(dist_a))
    path = shortest_path(graph, a, b)
    length = len(path) - 1
    return min(path[length // 2], path[(length + 1) // 2])


def rooted_tree(graph: Graph, root: Optional[int] = None) -> TreeView:
    """Root a tree graph; the default root is the (lower-id) center."""
    if not graph.is_tree():
        raise StructureError(f"graph has {graph.edge_count} edges, a tree on {graph.n} vertices has {graph.n - 1}")
    if root is None:
        root = tree_center(graph)
    if not 0 <= root < graph.n:
        raise ParameterError(f"root {root} outside 0..{graph.n - 1}")

    return _tree_from_edges(graph, root, nx.bfs_edges(graph.nx_view, root))


def dfs_tree(graph: Graph, root: int = 0) -> TreeView:
    """Depth-first spanning tree, neighbours tried in ascending id order."""
    return _tree_from_edges(graph, root, nx.dfs_edges(graph.nx_view, root))


def _tree_from_edges(graph: Graph, root: int, tree_edges: Iterable[Edge]) -> TreeView:
    """TreeView from (parent, child) edges listed parents first."""
    parent: Dict[int, Optional[int]] = {root: None}
    depth = {root: 0}
    children: Dict[int, List[int]] = {root: []}
    for u, w in tree_edges:
        parent[w] = u
        depth[w] = depth[u] + 1
        children[w] = []
        children[u].append(w)
    return TreeView(graph, root, parent, depth, {v: tuple(cs) for v, cs in children.items()})


def truncate_at_depth(tree: TreeView, x: int) -> TreeView:
    """The part of the tree within distance x of its root."""
    if x < 0:
        raise ParameterError(f"depth bound must be non-negative, got {x}")
    keep = {v for v, d in tree.depth.items() if d <= x}
    return TreeView(
        graph=tree.graph,
        root=tree.root,
        parent={v: tree.parent[v] for v in keep},
        depth={v: tree.depth[v] for v in keep},
        children={v: tuple(c for c in tree.children[v] if c in keep) for v in keep},
    )


def euler_tour(tree: TreeView) -> List[int]:
    """Closed DFS walk from the root, children in ascending id order."""
    tour = [tree.root]
    stack = [(tree.root, iter(tree.children[tree.root]))]
    while stack:
        v, pending = stack[-1]
        child = next(pending, None)
        if child is None:
            stack.pop()
            if stack:
                tour.append(stack[-1][0])
            continue
        tour.append(child)
        stack.append((child, iter(tree.children[child])))
    return tour


def dfs_leaf_order(tree: TreeView) -> List[int]:
    """Leaves in DFS discovery order (ascending child ids)."""
    leaves = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        kids = tree.children[v]
        if not kids:
            leaves.append(v)
        stack.extend(reversed(kids))
    return leaves


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def mesh_vertex(p: int, column: int, row: int) -> int:
    """Vertex id of the mesh cell at 1-based (column, row)."""
    return (column - 1) * p + (row - 1)


def _require(condition: bool, message: str):
    if not condition:
        raise ParameterError(message)


def _int_params(desc: TopologyDescriptor, count: int) -> List[int]:
    _require(len(desc.params) == count, f"{desc.family} takes {count} parameter(s), got {len(desc.params)}")
    try:
        return [int(p) for p in desc.params]
    except (TypeError, ValueError):
        raise ParameterError(f"{desc.family} parameters must be integers: {desc.params}")


def spider_graph(arms: Sequence[int]) -> Graph:
    _require(len(arms) >= 3, f"spider needs root degree >= 3, got {len(arms)} arms")
    _require(all(int(a) >= 1 for a in arms), f"spider arm lengths must be >= 1: {list(arms)}")
    edges = []
    nxt = 1
    for length in arms:
        prev = 0
        for _ in range(int(length)):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return Graph.from_edges(nxt, edges)


def random_tree(n: int, seed: int) -> Graph:
    """Uniform random labelled tree from a seeded Pruefer sequence."""
    _require(n >= 1, f"random_tree needs n >= 1, got {n}")
    if n <= 2:
        return Graph.from_edges(n, [(0, 1)] if n == 2 else [])
    rng = random.Random(seed)
    sequence = [rng.randrange(n) for _ in range(n - 2)]
    return Graph.from_networkx(nx.from_prufer_sequence(sequence))


def random_connected(n: int, extra_edge_probability: float, seed: int) -> Graph:
    """Random tree plus independent extra edges, so always connected."""
    _require(0.0 <= extra_edge_probability <= 1.0, f"edge probability must lie in [0, 1], got {extra_edge_probability}")
    tree = random_tree(n, seed)
    rng = random.Random(seed + 1)
    edges = set(tree.edges)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra_edge_probability:
                edges.add((u, v))
    return Graph.from_edges(n, edges)


def kahn_pair(arm_count: int, long_length: int) -> Tuple[Graph, Graph]:
    """The spider G and its supergraph G* with each long arm joined to the following short arm."""
    _require(arm_count >= 4 and arm_count % 2 == 0, f"kahn_pair needs an even arm count >= 4, got {arm_count}")
    _require(long_length >= 1, f"kahn_pair long arm length must be >= 1, got {long_length}")
    arms = [long_length if i % 2 == 0 else 1 for i in range(arm_count)]
    base = spider_graph(arms)

    extra = set(base.edges)
    for pair in range(arm_count // 2):
        first = 1 + pair * (long_length + 1)
        long_arm = range(first, first + long_length)
        short_vertex = first + long_length
        for v in long_arm:
            extra.add((min(v, short_vertex), max(v, short_vertex)))
    return base, Graph.from_edges(base.n, extra)


def generate(desc: TopologyDescriptor) -> Union[Graph, Tuple[Graph, Graph]]:
    """Build the graph a descriptor names (a (G, G*) pair for kahn_pair)."""
    family = desc.family

    if family == 'path':
        (n,) = _int_params(desc, 1)
        _require(n >= 1, f"path needs n >= 1, got {n}")
        return Graph.from_networkx(nx.path_graph(n))
    if family == 'cycle':
        (n,) = _int_params(desc, 1)
        _require(n >= 3, f"cycle needs n >= 3, got {n}")
        return Graph.from_networkx(nx.cycle_graph(n))
    if family == 'complete':
        (n,) = _int_params(desc, 1)
        _require(n >= 1, f"complete needs n >= 1, got {n}")
        return Graph.from_networkx(nx.complete_graph(n))
    if family == 'complete_bipartite':
        m, n = _int_params(desc, 2)
        _require(m >= 1 and n >= 1, f"complete_bipartite needs m, n >= 1, got {m}, {n}")
        return Graph.from_networkx(nx.complete_bipartite_graph(m, n))
    if family == 'star':
        (leaves,) = _int_params(desc, 1)
        _require(leaves >= 1, f"star needs at least one leaf, got {leaves}")
        return Graph.from_networkx(nx.star_graph(leaves))
    if family == 'spider':
        _require(len(desc.params) >= 3, f"spider needs root degree >= 3, got {len(desc.params)} arms")
        return spider_graph([int(a) for a in desc.params])
    if family == 'kary_tree':
        k, h = _int_params(desc, 2)
        _require(k >= 1 and h >= 0, f"kary_tree needs k >= 1 and h >= 0, got {k}, {h}")
        return Graph.from_networkx(nx.balanced_tree(k, h))
    if family in ('mesh', 'cylinder'):
        p, q = _int_params(desc, 2)
        _require(p >= 1 and q >= 1, f"{family} needs p, q >= 1, got {p}, {q}")
        _require(family == 'mesh' or q >= 3, f"cylinder needs q >= 3 columns, got {q}")
        grid = nx.grid_2d_graph(q, p, periodic=(family == 'cylinder', False))
        grid = nx.relabel_nodes(grid, {(i, j): i * p + j for i, j in grid.nodes()})
        return Graph.from_networkx(grid)
    if family == 'random_tree':
        n, seed = _int_params(desc, 2)
        return random_tree(n, seed)
    if family == 'random_connected':
        _require(len(desc.params) == 3, "random_connected takes n, probability, seed")
        return random_connected(int(desc.params[0]), float(desc.params[1]), int(desc.params[2]))
    if family == 'kahn_pair':
        _require(len(desc.params) in (2, 3), "kahn_pair takes arm count, long length and an optional member")
        return kahn_pair(int(desc.params[0]), int(desc.params[1]))
    if family == 'edge_list_file':
        _require(len(desc.params) == 1, "edge_list_file takes exactly one path")
        return read_edge_list(desc.params[0])

    raise ParameterError(f"unknown topology family '{family}' (known: {', '.join(FAMILIES)})")


def build_graph(desc: TopologyDescriptor) -> Graph:
    """Like generate, but always a single graph; kahn_pair picks G* unless the member is 'base'."""
    result = generate(desc)
    if isinstance(result, tuple):
        member = desc.params[2] if len(desc.params) == 3 else 'star'
        _require(member in ('base', 'star'), f"kahn_pair member must be 'base' or 'star', got '{member}'")
        return result[0] if member == 'base' else result[1]
    return result


def parse_topology(text: str) -> TopologyDescriptor:
    """Parse 'family:p1,p2,...' (e.g. 'mesh:4,6', 'spider:2,2,2')."""
    family, _, rest = text.strip().partition(':')
    family = family.strip()
    if family not in FAMILIES:
        raise ParameterError(f"unknown topology family '{family}' (known: {', '.join(FAMILIES)})")
    if family == 'edge_list_file':
        return TopologyDescriptor(family, (rest.strip(),))

    params = []
    for token in filter(None, (t.strip() for t in rest.split(','))):
        try:
            params.append(int(token))
        except ValueError:
            try:
                params.append(float(token))
            except ValueError:
                params.append(token)
    return TopologyDescriptor(family, tuple(params))


def expected_size(desc: TopologyDescriptor) -> Tuple[int, int]:
    """Closed-form (vertex, edge) counts for the deterministic families."""
    family, params = desc.family, desc.params
    if family == 'path':
        return params[0], params[0] - 1
    if family == 'cycle':
        return params[0], params[0]
    if family == 'complete':
        n = params[0]
        return n, n * (n - 1) // 2
    if family == 'complete_bipartite':
        m, n = params
        return m + n, m * n
    if family == 'star':
        return params[0] + 1, params[0]
    if family == 'spider':
        total = sum(params)
        return total + 1, total
    if family == 'kary_tree':
        k, h = params
        n = h + 1 if k == 1 else (k ** (h + 1) - 1) // (k - 1)
        return n, n - 1
    if family == 'mesh':
        p, q = params
        return p * q, p * (q - 1) + q * (p - 1)
    if family == 'cylinder':
        p, q = params
        return p * q, p * q + q * (p - 1)
    raise ParameterError(f"no closed-form size for family '{family}'")


# ---------------------------------------------------------------------------
# Edge-list interchange
# ---------------------------------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list format: first line n, then 'u v' pairs; '#' starts a comment."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise StructureError("edge list is empty")

    lineno, header = rows[0]
    if len(header) != 1:
        raise StructureError(f"line {lineno}: expected vertex count, got '{' '.join(header)}'")
    try:
        n = int(header[0])
    except ValueError:
        raise StructureError(f"line {lineno}: vertex count must be an integer")

    edges = set()
    for lineno, fields in rows[1:]:
        if len(fields) != 2:
            raise StructureError(f"line {lineno}: expected 'u v', got '{' '.join(fields)}'")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise StructureError(f"line {lineno}: vertex ids must be integers")
        if u == v:
            raise StructureError(f"line {lineno}: loop at vertex {u}")
        edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


def read_edge_list(path: Union[str, Path]) -> Graph:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_edge_list(f.read())


def format_edge_list(graph: Graph) -> str:
    lines = [str(graph.n)]
    lines.extend(f"{u} {v}" for u, v in graph.sorted_edges())
    return '\n'.join(lines) + '\n'


def write_edge_list(graph: Graph, path: Union[str, Path]):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(format_edge_list(graph))


