"""Hall-theory primitives and the exact 0-1 loss solver.

For 0-1 loss a learner is a choice, per variable, of at most one neighbouring
row to "credit". A row with ``c`` credits has error ``(n - c)/n``, so error at
most ``eps`` everywhere is a demand-feasibility question: can every row
collect ``ceil(n (1 - eps))`` credits when each variable supplies one unit?
That is the d-fold splitting argument, solved here as a max-flow with row
demands rather than by copying nodes.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .oig import AssignmentProblem, LearnerAssignment

DEFAULT_BLOCKING_CAP = 16


class GraphError(ValueError):
    pass


class DeficientGraphError(GraphError):
    pass


@dataclass(frozen=True)
class BipartiteGraph:
    """``edges[l]`` lists the right nodes adjacent to left node ``l``."""

    left: int
    right: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        edges = tuple(tuple(dict.fromkeys(int(r) for r in adj)) for adj in self.edges)
        if len(edges) != self.left:
            raise GraphError(f"{len(edges)} adjacency lists for {self.left} left nodes")
        for l, adj in enumerate(edges):
            for r in adj:
                if not 0 <= r < self.right:
                    raise GraphError(f"edge ({l}, {r}) points outside the right side")
        object.__setattr__(self, "edges", edges)

    def right_adjacency(self) -> list[list[int]]:
        radj: list[list[int]] = [[] for _ in range(self.right)]
        for l, adj in enumerate(self.edges):
            for r in adj:
                radj[r].append(l)
        return radj

    def neighborhood(self, rights) -> set[int]:
        rights = set(rights)
        return {l for l, adj in enumerate(self.edges) if rights.intersection(adj)}

    def to_dict(self) -> dict:
        return {"left": self.left, "right": self.right, "edges": [list(a) for a in self.edges]}

    @classmethod
    def from_dict(cls, doc: dict) -> "BipartiteGraph":
        return cls(int(doc["left"]), int(doc["right"]), tuple(tuple(a) for a in doc["edges"]))


@dataclass(frozen=True)
class MatchingResult:
    status: str  # "matched" | "deficient"
    matching: dict[int, int]  # left -> right
    certificate: frozenset[int]

    @property
    def matched(self) -> bool:
        return self.status == "matched"

    def to_dict(self) -> dict:
        return {"status": self.status,
                "matching": {str(l): r for l, r in sorted(self.matching.items())},
                "certificate": sorted(self.certificate)}


def maximum_matching(graph: BipartiteGraph) -> tuple[list[int | None], list[int | None]]:
    """Hopcroft-Karp, searching from the right side.

    Returns ``(match_left, match_right)``; ``match_left[l]`` is the right
    node matched to ``l`` or None.
    """
    radj = graph.right_adjacency()
    match_left: list[int | None] = [None] * graph.left
    match_right: list[int | None] = [None] * graph.right
    inf = math.inf

    while True:
        # layer the right side by alternating distance from free right nodes
        dist = [inf] * graph.right
        queue = deque()
        for r in range(graph.right):
            if match_right[r] is None:
                dist[r] = 0
                queue.append(r)
        found = inf
        while queue:
            r = queue.popleft()
            if dist[r] >= found:
                continue
            for l in radj[r]:
                r2 = match_left[l]
                if r2 is None:
                    found = min(found, dist[r] + 1)
                elif dist[r2] == inf:
                    dist[r2] = dist[r] + 1
                    queue.append(r2)
        if found == inf:
            break

        def augment(r: int) -> bool:
            for l in radj[r]:
                r2 = match_left[l]
                if r2 is None:
                    if dist[r] + 1 != found:
                        continue
                elif dist[r2] != dist[r] + 1 or not augment(r2):
                    continue
                match_left[l] = r
                match_right[r] = l
                return True
            dist[r] = inf
            return False

        for r in range(graph.right):
            if match_right[r] is None:
                augment(r)
    return match_left, match_right


def _hall_witness(graph: BipartiteGraph, match_left, match_right) -> frozenset[int]:
    """Right nodes reachable by alternating paths from unmatched right nodes.

    With a maximum matching, every left node reached is matched into the
    set, so the set's neighbourhood is smaller by exactly the number of free
    right nodes.
    """
    radj = graph.right_adjacency()
    seen = {r for r in range(graph.right) if match_right[r] is None}
    queue = deque(seen)
    while queue:
        r = queue.popleft()
        for l in radj[r]:
            r2 = match_left[l]
            if r2 is not None and r2 not in seen:
                seen.add(r2)
                queue.append(r2)
    return frozenset(seen)


def deficiency(graph: BipartiteGraph) -> tuple[int, frozenset[int]]:
    """``max |R'| - |N(R')|`` over right subsets, with a set attaining it."""
    match_left, match_right = maximum_matching(graph)
    size = sum(1 for r in match_right if r is not None)
    defect = graph.right - size
    if defect == 0:
        return 0, frozenset()
    return defect, _hall_witness(graph, match_left, match_right)


def r_matching(graph: BipartiteGraph) -> MatchingResult:
    """A matching covering every right node, or a Hall-violating right set."""
    match_left, match_right = maximum_matching(graph)
    matching = {l: r for l, r in enumerate(match_left) if r is not None}
    if len(matching) == graph.right:
        return MatchingResult("matched", matching, frozenset())
    return MatchingResult("deficient", matching, _hall_witness(graph, match_left, match_right))


def _neighbor_masks(adj_right: Sequence[int], nright: int) -> list[int]:
    """``out[mask]`` = bitmask of left neighbours of the right subset ``mask``."""
    out = [0] * (1 << nright)
    for mask in range(1, 1 << nright):
        low = mask & -mask
        out[mask] = out[mask ^ low] | adj_right[low.bit_length() - 1]
    return out


def blocking_sets(graph: BipartiteGraph, cap: int = DEFAULT_BLOCKING_CAP) -> list[int]:
    """Nonempty right subsets (as bitmasks) with ``|N(R')| == |R'|``."""
    if graph.right > cap:
        raise GraphError(f"blocking-set enumeration capped at |R| <= {cap}, got {graph.right}")
    adj_right = [0] * graph.right
    for l, adj in enumerate(graph.edges):
        for r in adj:
            adj_right[r] |= 1 << l
    nbr = _neighbor_masks(adj_right, graph.right)
    return [m for m in range(1, 1 << graph.right) if nbr[m].bit_count() == m.bit_count()]


def prune_degrees(graph: BipartiteGraph, cap: int = DEFAULT_BLOCKING_CAP) -> BipartiteGraph:
    """Finite run of the degree-pruning argument on a matchable graph.

    Left nodes outside every blocking set are dropped one at a time (highest
    index first) until none remain; each survivor then keeps only its edges
    into the smallest blocking set that contains it. Dropped nodes keep their
    index with an empty adjacency list.
    """
    if graph.right > cap:
        raise GraphError(f"blocking-set enumeration capped at |R| <= {cap}, got {graph.right}")
    if deficiency(graph)[0] != 0:
        raise DeficientGraphError("prune_degrees needs an R-matchable graph")
    edges = [list(adj) for adj in graph.edges]

    def nbr_table():
        adj_right = [0] * graph.right
        for l, adj in enumerate(edges):
            for r in adj:
                adj_right[r] |= 1 << l
        return _neighbor_masks(adj_right, graph.right)

    while True:
        nbr = nbr_table()
        covered = 0
        for m in range(1, 1 << graph.right):
            if nbr[m].bit_count() == m.bit_count():
                covered |= nbr[m]
        loose = [l for l in range(graph.left) if edges[l] and not covered >> l & 1]
        if not loose:
            break
        edges[loose[-1]] = []

    for l in range(graph.left):
        if not edges[l]:
            continue
        nbr = nbr_table()
        best = None
        for m in range(1, 1 << graph.right):
            if nbr[m] >> l & 1 and nbr[m].bit_count() == m.bit_count():
                if best is None or (m.bit_count(), m) < (best.bit_count(), best):
                    best = m
        assert best is not None, "surviving node must lie in a blocking set"
        edges[l] = [r for r in edges[l] if best >> r & 1]

    pruned = BipartiteGraph(graph.left, graph.right, tuple(tuple(a) for a in edges))
    assert deficiency(pruned)[0] == 0, "pruning broke Hall's condition"
    return pruned


class FlowNetwork:
    """Dinic max-flow on integer capacities."""

    def __init__(self, nodes: int):
        self.nodes = nodes
        self.adj: list[list[int]] = [[] for _ in range(nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)
        return len(self.to) - 2

    def flow_on(self, edge: int) -> int:
        return self.cap[edge ^ 1]

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        while True:
            level = [-1] * self.nodes
            level[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for e in self.adj[u]:
                    if self.cap[e] > 0 and level[self.to[e]] < 0:
                        level[self.to[e]] = level[u] + 1
                        queue.append(self.to[e])
            if level[t] < 0:
                return total
            it = [0] * self.nodes

            def push(u: int, f: int) -> int:
                if u == t:
                    return f
                while it[u] < len(self.adj[u]):
                    e = self.adj[u][it[u]]
                    v = self.to[e]
                    if self.cap[e] > 0 and level[v] == level[u] + 1:
                        got = push(v, min(f, self.cap[e]))
                        if got:
                            self.cap[e] -= got
                            self.cap[e ^ 1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                f = push(s, 1 << 62)
                if not f:
                    break
                total += f

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.adj[u]:
                if self.cap[e] > 0 and self.to[e] not in seen:
                    seen.add(self.to[e])
                    queue.append(self.to[e])
        return seen


def problem_graph(problem: AssignmentProblem) -> BipartiteGraph:
    """Variables on the left, rows on the right, edges by dependence."""
    return BipartiteGraph(len(problem.variables), len(problem.rows),
                          tuple(tuple(r for r, _ in nb) for nb in problem.neighbors))


def split_graph(problem: AssignmentProblem, demands: Sequence[int]) -> tuple[BipartiteGraph, list[int]]:
    """Literal splitting: ``demands[r]`` copies of row ``r``. Returns the graph
    and the row owning each right copy."""
    owner: list[int] = []
    first: list[int] = []
    for r, dem in enumerate(demands):
        first.append(len(owner))
        owner.extend([r] * dem)
    edges = []
    for nb in problem.neighbors:
        edges.append(tuple(first[r] + c for r, _ in nb for c in range(demands[r])))
    return BipartiteGraph(len(problem.variables), len(owner), tuple(edges)), owner


def row_demands(problem: AssignmentProblem, epsilon: Fraction | Sequence[Fraction]) -> list[int]:
    """Credits each row needs for error (minus offset) at most ``epsilon``.

    ``(n - c)/n - offset <= eps``  iff  ``c >= ceil(n (1 - offset - eps))``.
    """
    n = problem.n
    eps = [Fraction(epsilon)] * len(problem.rows) if not isinstance(epsilon, (list, tuple)) \
        else [Fraction(e) for e in epsilon]
    return [max(0, math.ceil(n * (1 - off - e))) for off, e in zip(problem.offsets, eps)]


@dataclass(frozen=True)
class DemandFlow:
    feasible: bool
    assignment: dict[int, int]  # variable -> credited row
    shortfall_rows: frozenset[int]  # Hall-type certificate when infeasible
    shortfall_neighbors: int


def demand_flow(problem: AssignmentProblem, demands: Sequence[int]) -> DemandFlow:
    """Can each variable credit at most one neighbour so row ``r`` gets ``demands[r]``?

    When not, the demanding rows on the sink side of a minimum cut form a
    set ``T`` whose neighbouring variables number fewer than ``sum(demands[T])``.
    """
    nv, nr = len(problem.variables), len(problem.rows)
    source, sink = nv + nr, nv + nr + 1
    net = FlowNetwork(nv + nr + 2)
    arcs: dict[tuple[int, int], int] = {}
    for v in range(nv):
        net.add_edge(source, v, 1)
        for r, _ in problem.neighbors[v]:
            arcs[v, r] = net.add_edge(v, nv + r, 1)
    for r in range(nr):
        if demands[r]:
            net.add_edge(nv + r, sink, demands[r])
    need = sum(demands)
    got = net.max_flow(source, sink)
    assignment = {v: r for (v, r), e in arcs.items() if net.flow_on(e)}
    if got == need:
        return DemandFlow(True, assignment, frozenset(), 0)
    side = net.reachable(source)
    rows = frozenset(r for r in range(nr) if nv + r not in side and demands[r])
    nbrs = {v for v in range(nv) if any(r in rows for r, _ in problem.neighbors[v])}
    return DemandFlow(False, assignment, rows, len(nbrs))


@dataclass(frozen=True)
class ZeroOneSolution:
    epsilon: Fraction
    d_star: int
    learner: LearnerAssignment
    certificate: dict | None  # infeasibility witness one grid step below epsilon

    def to_dict(self, problem: AssignmentProblem) -> dict:
        return {"epsilon": str(self.epsilon), "d_star": self.d_star,
                "learner": self.learner.to_dict(problem),
                "certificates": [] if self.certificate is None else [self.certificate]}


class LossKindError(ValueError):
    pass


def achievable_zero_one(problem: AssignmentProblem, epsilon=None) -> DemandFlow:
    """Decision query: is worst-case error <= epsilon (or the per-row targets) achievable?"""
    if problem.space.kind != "zero-one":
        raise LossKindError(f"matching solver needs kind=zero-one, got {problem.space.kind}")
    eps = list(problem.targets) if epsilon is None else Fraction(epsilon)
    return demand_flow(problem, row_demands(problem, eps))


def optimal_zero_one(problem: AssignmentProblem) -> ZeroOneSolution:
    """Exact optimal worst-case 0-1 error, on the grid ``{j/n}``.

    ``d_star`` is ``n (1 - epsilon)``: the credits guaranteed to every row
    (shifted by offsets in the agnostic case).
    """
    if problem.space.kind != "zero-one":
        raise LossKindError(f"matching solver needs kind=zero-one, got {problem.space.kind}")
    n = problem.n

    def feasible(j: int) -> DemandFlow:
        return demand_flow(problem, row_demands(problem, Fraction(j, n)))

    lo, hi = -n, n  # error n/n needs no credits
    best = feasible(hi)
    assert best.feasible, "error n/n must always be achievable"
    while lo < hi:
        mid = (lo + hi) // 2
        res = feasible(mid)
        if res.feasible:
            hi, best = mid, res
        else:
            lo = mid + 1
    j_star = hi
    certificate = None
    if j_star > -n:
        below = feasible(j_star - 1)
        assert not below.feasible, "feasibility must be monotone in epsilon"
        demands = row_demands(problem, Fraction(j_star - 1, n))
        certificate = {
            "epsilon_below": str(Fraction(j_star - 1, n)),
            "rows": sorted(below.shortfall_rows),
            "neighbors": below.shortfall_neighbors,
            "demand": sum(demands[r] for r in below.shortfall_rows),
        }
    choice = [0] * len(problem.variables)
    for v, r in best.assignment.items():
        choice[v] = problem.rows[r][problem.variables[v].hole]
    return ZeroOneSolution(Fraction(j_star, n), n - j_star, LearnerAssignment(tuple(choice)),
                           certificate)
