"""
Strategies for spiders and general trees.

Spiders are swept arm by arm from the root. Trees use in-order leaf
visits (k-ary and binary), blocks of small subtrees cleaned in root round
trips (bounded height, with the cut Euler tour as a baseline), and the
center-anchored auxiliary-step policy for arbitrary trees.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from dynamics import LENIENT, STRICT
from errors import ApplicabilityError, ParameterError
from graph_core import (
    Graph,
    TopologyDescriptor,
    TreeView,
    dfs_leaf_order,
    euler_tour,
    rooted_tree,
    truncate_at_depth,
)
from strategies import MoveScript, ProgramPilot, register, script_pilot


# ---------------------------------------------------------------------------
# Spiders
# ---------------------------------------------------------------------------

@dataclass
class SpiderSchedule:
    """Arm order and tau requirement of the iterative spider sweep."""

    root: int
    arms: List[List[int]]
    tau: int
    iteration_starts: List[int] = field(default_factory=list)
    targets: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return len(self.arms)

    @property
    def longest(self) -> int:
        return max(len(arm) for arm in self.arms)


def spider_arms(graph: Graph) -> Tuple[int, List[List[int]]]:
    """(root, arms listed outwards), arms in ascending order of their first vertex."""
    hubs = [v for v in range(graph.n) if graph.degree(v) >= 3]
    if not graph.is_tree() or len(hubs) != 1:
        raise ApplicabilityError("graph is not a spider (needs a tree with exactly one vertex of degree >= 3)")
    root = hubs[0]
    arms = []
    for first in graph.adjacency[root]:
        arm = [first]
        while graph.degree(arm[-1]) == 2:
            a, b = graph.adjacency[arm[-1]]
            previous = arm[-2] if len(arm) > 1 else root
            arm.append(b if a == previous else a)
        arms.append(arm)
    return root, arms


def spider_tau(arm_count: int, longest: int) -> int:
    return math.ceil(arm_count + math.sqrt(arm_count ** 2 + 4 * longest))


def _out_and_back(pilot: ProgramPilot, root: int, arm: List[int], schedule: Optional[SpiderSchedule] = None) -> Iterator[int]:
    """Walk an arm up to its farthest contaminated vertex and come back to the root."""
    clean = pilot.state.clean
    far = max((i for i, v in enumerate(arm) if not clean[v]), default=None)
    if far is None:
        return
    if schedule is not None:
        schedule.targets.append((arm[0], far + 1))
    yield from arm[:far + 1]
    yield from reversed(arm[:far])
    yield root


def _iterate_arms(pilot: ProgramPilot, root: int, arms: List[List[int]],
                  schedule: Optional[SpiderSchedule] = None) -> Iterator[int]:
    """Iteration j sweeps arm j, then arms j-1 .. 1; repeat full passes until the arms are clean.

    Repeat passes are counted in ``pilot.notes['repeat_passes']``.
    """
    for j in range(len(arms)):
        if schedule is not None:
            schedule.iteration_starts.append(pilot.state.tick)
        for i in range(j, -1, -1):
            yield from _out_and_back(pilot, root, arms[i], schedule)

    while any(not pilot.state.clean[v] for arm in arms for v in arm):
        pilot.notes['repeat_passes'] += 1
        for arm in reversed(arms):
            yield from _out_and_back(pilot, root, arm, schedule)


def _longest_first(arms: List[List[int]]) -> List[List[int]]:
    return sorted(arms, key=lambda arm: (-len(arm), arm[0]))


def spider_iterative(graph: Graph) -> Tuple[SpiderSchedule, ProgramPilot]:
    root, arms = spider_arms(graph)
    ordered = _longest_first(arms)
    schedule = SpiderSchedule(root, ordered, spider_tau(len(ordered), max(len(a) for a in ordered)))

    def program(pilot: ProgramPilot) -> Iterator[int]:
        yield from _iterate_arms(pilot, root, ordered, schedule)

    pilot = ProgramPilot('spider-iter', root, program)
    pilot.notes.update(schedule=schedule, repeat_passes=0)
    return schedule, pilot


def spider_sqrt_tau(n: int) -> int:
    return math.ceil(4 * math.sqrt(n))


def spider_sqrt(graph: Graph) -> ProgramPilot:
    """Iterative sweep of the long arms, then an in-order pass over the short ones."""
    root, arms = spider_arms(graph)
    threshold = math.sqrt(graph.n)
    if len(arms) > threshold:
        short = [arm for arm in arms if len(arm) < threshold]
        long = [arm for arm in arms if len(arm) >= threshold]
    else:
        short, long = [], arms
    long = _longest_first(long)
    schedule = SpiderSchedule(root, long, spider_sqrt_tau(graph.n))

    def program(pilot: ProgramPilot) -> Iterator[int]:
        yield from _iterate_arms(pilot, root, long, schedule)
        pilot.notes['short_phase_tick'] = pilot.state.tick
        for arm in short:
            yield from arm
            yield from reversed(arm[:-1])
            yield root

    pilot = ProgramPilot('spider-sqrt', root, program)
    pilot.notes.update(schedule=schedule, short_arms=len(short), long_arms=len(long), repeat_passes=0)
    return pilot


def spider_naive(graph: Graph) -> MoveScript:
    """Each arm to its end and back, once; monotone at twice the longest arm."""
    root, arms = spider_arms(graph)
    walk = []
    for arm in arms:
        walk.extend(arm)
        walk.extend(reversed(arm[:-1]))
        walk.append(root)
    return MoveScript(root, tuple(walk[:-1]))


# ---------------------------------------------------------------------------
# Rooted trees
# ---------------------------------------------------------------------------

def default_root(graph: Graph, desc: Optional[TopologyDescriptor]) -> TreeView:
    """Generator root for kary_tree descriptors, the center otherwise."""
    if not graph.is_tree():
        raise ApplicabilityError("strategy needs a tree")
    if desc is not None and desc.family == 'kary_tree':
        return rooted_tree(graph, 0)
    return rooted_tree(graph)


def subtree_view(tree: TreeView, top: int) -> TreeView:
    """The subtree hanging from ``top``, re-rooted there."""
    keep = [top]
    for v in keep:
        keep.extend(tree.children[v])
    base = tree.depth[top]
    return TreeView(
        graph=tree.graph,
        root=top,
        parent={v: (None if v == top else tree.parent[v]) for v in keep},
        depth={v: tree.depth[v] - base for v in keep},
        children={v: tree.children[v] for v in keep},
    )


def _inorder_walk(tree: TreeView) -> List[int]:
    """Root, then every leaf in DFS order with a return to the root after each."""
    walk = [tree.root]
    for leaf in dfs_leaf_order(tree):
        if leaf == tree.root:
            continue
        path = tree.path_from_root(leaf)
        walk.extend(path[1:])
        walk.extend(reversed(path[:-1]))
    return walk


def kary_inorder(tree: TreeView) -> MoveScript:
    walk = _inorder_walk(tree)
    return MoveScript(walk[0], tuple(walk[1:-1] if len(walk) > 1 else ()))


def binary_two_phase(tree: TreeView) -> MoveScript:
    """Clear the left subtree in order, cross the root, then clear the right subtree."""
    if any(len(kids) > 2 for kids in tree.children.values()):
        raise ApplicabilityError("binary_two_phase needs a tree with at most two children per vertex")
    if tree.height < 2:
        raise ApplicabilityError(f"binary_two_phase needs height >= 2, got {tree.height}")

    kids = tree.children[tree.root]
    walk = _inorder_walk(subtree_view(tree, kids[0]))
    walk.append(tree.root)
    if len(kids) == 2:
        walk.extend(_inorder_walk(subtree_view(tree, kids[1])))
    return MoveScript(walk[0], tuple(walk[1:]))


def _check_alpha(alpha: float):
    if alpha <= 2:
        raise ParameterError(f"alpha must exceed 2, got {alpha}")


def unit_limit(alpha: float, height: int) -> int:
    """Largest subtree cleaned in one piece: (alpha/2 - 1)h, at least one vertex."""
    return max(1, math.floor((alpha - 2) * height / 2))


def _tree_walk(tree: TreeView, source: int, target: int) -> List[int]:
    """Vertices after ``source`` on the tree path to ``target``."""
    up, down = tree.path_from_root(source), tree.path_from_root(target)
    common = 0
    while common < min(len(up), len(down)) and up[common] == down[common]:
        common += 1
    return up[common - 1:-1][::-1] + down[common:]


def _unit_tops(tree: TreeView, sizes: Dict[int, int], limit: int) -> List[int]:
    """Roots of the maximal subtrees within the limit.

    At every vertex the large child subtrees come first, each one finished
    before the next, then the vertex's own small children in id order.
    """
    tops = []
    stack = [(tree.root, False)]
    while stack:
        v, expanded = stack.pop()
        if expanded:
            tops.extend(c for c in tree.children[v] if sizes[c] <= limit)
            continue
        stack.append((v, True))
        stack.extend((c, False) for c in reversed(tree.children[v]) if sizes[c] > limit)
    return tops


def block_plan(tree: TreeView, alpha: float) -> List[List[int]]:
    """Unit tops grouped into blocks, each block one round trip from the root.

    A block takes consecutive units while its round trip (the tree edges to
    the units' parents, twice, plus a full traversal of every unit) stays
    within ceil(alpha*h) moves. An empty plan means the whole tree is one unit.
    """
    _check_alpha(alpha)
    limit = unit_limit(alpha, tree.height)
    sizes = tree.subtree_sizes()
    if sizes[tree.root] <= limit:
        return []

    budget = math.ceil(alpha * tree.height)
    blocks: List[List[int]] = []
    current: List[int] = []
    reached = {tree.root}
    cost = 0
    for top in _unit_tops(tree, sizes, limit):
        path = tree.path_from_root(tree.parent[top])
        fresh = [v for v in path if v not in reached]
        extra = 2 * (len(fresh) + sizes[top])
        if current and cost + extra > budget:
            blocks.append(current)
            current, reached, cost = [], {tree.root}, 0
            fresh = path[1:]
            extra = 2 * (len(fresh) + sizes[top])
        reached.update(fresh)
        cost += extra
        current.append(top)
    blocks.append(current)
    return blocks


def small_height_walk(tree: TreeView, alpha: float) -> List[int]:
    """Closed walk from the root cleaning one block per round trip.

    Every unit is entered from its parent, traversed depth first and left
    back through the parent. Any vertex still bordering contamination lies
    on the root path of the next block, so it is revisited within
    ceil(alpha*h) ticks and the walk is monotone at that tau.
    """
    blocks = block_plan(tree, alpha)
    if not blocks:
        return euler_tour(tree)
    walk = [tree.root]
    for block in blocks:
        for top in block:
            parent = tree.parent[top]
            walk.extend(_tree_walk(tree, walk[-1], parent))
            walk.extend(euler_tour(subtree_view(tree, top)))
            walk.append(parent)
        walk.extend(_tree_walk(tree, walk[-1], tree.root))
    return walk


def small_height_moves_bound(n: int, height: int, alpha: float) -> float:
    return 2 * n * (alpha + 2) / (alpha - 2) + 2 * height


def tree_small_height(tree: TreeView, alpha: float = 3.0) -> MoveScript:
    walk = small_height_walk(tree, alpha)
    metadata = {'alpha': alpha, 'limit': unit_limit(alpha, tree.height), 'blocks': len(block_plan(tree, alpha))}
    return MoveScript(walk[0], tuple(walk[1:]), metadata)


def refresh_interval(alpha: float, height: int) -> int:
    return max(1, math.floor((alpha - 2) * height))


def euler_block_walk(tree: TreeView, alpha: float) -> List[int]:
    """Euler tour cut into blocks of at most (alpha-2)h tour moves.

    Between blocks the agent climbs to the root and comes back, so every
    vertex on the current root path is revisited within alpha*h - 1 ticks.
    """
    _check_alpha(alpha)
    block = refresh_interval(alpha, tree.height)
    walk = [tree.root]
    since_root = 0
    for v in euler_tour(tree)[1:]:
        if since_root >= block and walk[-1] != tree.root:
            path = tree.path_from_root(walk[-1])
            walk.extend(reversed(path[:-1]))
            walk.extend(path[1:])
            since_root = 0
        walk.append(v)
        since_root = 0 if v == tree.root else since_root + 1
    return walk


def euler_moves_bound(n: int, height: int, alpha: float) -> float:
    return 4 * n * (alpha - 1) / (alpha - 2) + 2 * height


def tree_sqrt(graph: Graph) -> ProgramPilot:
    """Center-anchored policy with auxiliary clean-ups on the way to every leaf.

    Each iteration: clean the ball of radius sqrt(n) around the center with
    the bounded-height walk, walk towards the next leaf in DFS order and,
    at branching vertices outside the cooldown, clean the ball of radius
    10*sqrt(n) around them; then return to the center. Iterations repeat
    until the tree is clean.
    """
    tree = rooted_tree(graph)
    center = tree.root
    root_scale = math.sqrt(graph.n)
    near = math.floor(root_scale)
    far = math.floor(10 * root_scale)
    cooldown = math.ceil(5 * root_scale)
    leaves = [leaf for leaf in dfs_leaf_order(tree) if leaf != center]

    def auxiliary(v: int, radius: int) -> List[int]:
        ball = truncate_at_depth(rooted_tree(graph, v), radius)
        return small_height_walk(ball, 3.0)[1:]

    def program(pilot: ProgramPilot) -> Iterator[int]:
        starts = pilot.notes['iteration_starts']
        while True:
            for leaf in leaves:
                starts.append(pilot.state.tick)
                yield from auxiliary(center, near)
                path = tree.path_from_root(leaf)
                walked_since_aux = cooldown
                for v in path[1:]:
                    yield v
                    walked_since_aux += 1
                    if graph.degree(v) > 2 and walked_since_aux >= cooldown:
                        pilot.notes['auxiliary_steps'] += 1
                        yield from auxiliary(v, far)
                        walked_since_aux = 0
                yield from reversed(path[:-1])
            if not leaves:
                return
            pilot.notes['repeat_passes'] += 1

    pilot = ProgramPilot('tree-sqrt', center, program)
    pilot.notes.update(iteration_starts=[], auxiliary_steps=0, repeat_passes=0)
    return pilot


def iteration_lengths(pilot: ProgramPilot, ticks_used: int) -> List[int]:
    """Moves spent in each tree_sqrt iteration, the last one possibly partial."""
    starts = pilot.notes.get('iteration_starts', [])
    bounds = starts + [ticks_used]
    return [b - a for a, b in zip(bounds, bounds[1:])]


# ---------------------------------------------------------------------------
# Registrations
# ---------------------------------------------------------------------------

def _spider_iter_tau(graph, desc, options):
    _, arms = spider_arms(graph)
    return spider_tau(len(arms), max(len(a) for a in arms))


def _spider_naive_tau(graph, desc, options):
    _, arms = spider_arms(graph)
    return 2 * max(len(a) for a in arms)


def _height_tau(offset: int):
    def formula(graph, desc, options):
        return max(0, 2 * default_root(graph, desc).height - offset)
    return formula


def _alpha(options: Dict) -> float:
    return float(options.get('alpha', 3.0))


def _small_height_tau(graph, desc, options):
    return math.ceil(_alpha(options) * default_root(graph, desc).height)


@register('spider-iter', STRICT, False, _spider_iter_tau, 'iterative arm sweeps up to the farthest contaminated vertex')
def _spider_iter(graph, desc, tau, options):
    return spider_iterative(graph)[1]


@register('spider-sqrt', STRICT, False, lambda g, d, o: spider_sqrt_tau(g.n),
          'iterative sweep of long arms, in-order pass over short arms')
def _spider_sqrt(graph, desc, tau, options):
    return spider_sqrt(graph)


@register('spider-naive', STRICT, True, _spider_naive_tau, 'each arm to its end and back, once')
def _spider_naive(graph, desc, tau, options):
    return script_pilot(spider_naive(graph), 'spider-naive')


@register('kary-inorder', LENIENT, True, _height_tau(1), 'visit leaves in DFS order, returning to the root')
def _kary(graph, desc, tau, options):
    return script_pilot(kary_inorder(default_root(graph, desc)), 'kary-inorder')


@register('binary-2phase', LENIENT, True, _height_tau(3), 'left subtree in order, then the right subtree')
def _binary(graph, desc, tau, options):
    return script_pilot(binary_two_phase(default_root(graph, desc)), 'binary-2phase')


@register('tree-smallh', STRICT, True, _small_height_tau, 'blocks of small subtrees, one root round trip each')
def _small_height(graph, desc, tau, options):
    script = tree_small_height(default_root(graph, desc), _alpha(options))
    pilot = script_pilot(script, 'tree-smallh')
    pilot.notes.update(script.metadata)
    return pilot


@register('tree-euler', STRICT, True, _small_height_tau, 'Euler tour cut into blocks with root refreshes')
def _euler_blocks(graph, desc, tau, options):
    alpha = _alpha(options)
    tree = default_root(graph, desc)
    walk = euler_block_walk(tree, alpha)
    return script_pilot(MoveScript(walk[0], tuple(walk[1:]), {'alpha': alpha}), 'tree-euler')


@register('tree-sqrt', STRICT, None, lambda g, d, o: math.ceil(30 * math.sqrt(g.n)),
          'center-anchored sweeps with auxiliary ball clean-ups')
def _tree_sqrt(graph, desc, tau, options):
    if not graph.is_tree():
        raise ApplicabilityError("tree-sqrt needs a tree")
    return tree_sqrt(graph)
