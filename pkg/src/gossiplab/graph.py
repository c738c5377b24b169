"""Directed communication graphs for broadcast protocols.

Edge convention: the ordered pair ``(i, j)`` means node ``i`` can hear
node ``j``, i.e. ``i`` is a receiver of ``j``'s broadcasts.  The
in-neighbors of ``i`` are the nodes it listens to; the out-neighbors of
``k`` are the nodes that listen to ``k``.  Node ids are 1-based.

Graphs are immutable.  Generators take an explicit ``numpy.random.Generator``
so every draw is reproducible from the caller's seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import RetryExhausted

DEFAULT_RETRY_BUDGET = 1000


@dataclass(frozen=True)
class DiGraph:
    """Immutable digraph on nodes 1..n with optional planar coordinates."""

    n: int
    edges: frozenset
    coords: np.ndarray | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one node")
        object.__setattr__(self, "edges", frozenset(self.edges))
        for (i, j) in self.edges:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge ({i}, {j}) outside node range 1..{self.n}")
            if i == j:
                raise ValueError(f"self-loop at node {i}")
        if self.coords is not None:
            c = np.array(self.coords, dtype=float)
            if c.shape != (self.n, 2):
                raise ValueError(f"coords must have shape ({self.n}, 2)")
            c.setflags(write=False)
            object.__setattr__(self, "coords", c)

    @cached_property
    def _adj(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for (i, j) in self.edges:
            a[i - 1, j - 1] = True
        a.setflags(write=False)
        return a

    def adjacency(self) -> np.ndarray:
        """0/1 matrix with entry (i, j) = 1 iff i receives from j."""
        return self._adj.astype(float)

    def in_neighbors(self, i: int) -> tuple:
        """Nodes that i listens to."""
        return tuple(np.flatnonzero(self._adj[i - 1]) + 1)

    def out_neighbors(self, k: int) -> tuple:
        """Nodes that listen to k."""
        return tuple(np.flatnonzero(self._adj[:, k - 1]) + 1)

    def in_degree(self, i: int) -> int:
        return int(self._adj[i - 1].sum())

    def out_degree(self, k: int) -> int:
        return int(self._adj[:, k - 1].sum())

    def is_symmetric(self) -> bool:
        """True when every link is bidirectional."""
        return all((j, i) in self.edges for (i, j) in self.edges)

    def sorted_edges(self) -> list:
        return sorted(self.edges)


def connectivity_radius(n: int) -> float:
    """Radius sqrt(2 ln n / n), above the connectivity threshold for
    uniform random points in the unit square."""
    if n < 2:
        raise ValueError("radius rule needs n >= 2")
    return math.sqrt(2.0 * math.log(n) / n)


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    """Boolean reachability from `start` following rows of a boolean adjacency."""
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    frontier = seen.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def is_strongly_connected(g: DiGraph) -> bool:
    """Every node reaches every other along directed edges."""
    if g.n == 1:
        return True
    adj = g._adj
    return bool(_reachable(adj, 0).all() and _reachable(adj.T, 0).all())


def random_geometric_graph(n: int, radius: float, rng: np.random.Generator,
                           retries: int = DEFAULT_RETRY_BUDGET) -> DiGraph:
    """Drop n points uniformly in the unit square and connect pairs within
    `radius` (both directions).  Redraws until connected; raises
    RetryExhausted after `retries` failed attempts."""
    if n < 2:
        raise ValueError("need at least two nodes")
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    r2 = radius * radius
    for _ in range(retries):
        pts = rng.random((n, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        close = d2 <= r2
        np.fill_diagonal(close, False)
        if _reachable(close, 0).all():
            edges = frozenset(
                (int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(close))
            )
            return DiGraph(n, edges, coords=pts)
    raise RetryExhausted(
        f"no connected geometric graph in {retries} draws "
        f"(n={n}, radius={radius:g})", attempts=retries)


def directify(g: DiGraph, p_asym: float, rng: np.random.Generator,
              retries: int = DEFAULT_RETRY_BUDGET) -> DiGraph:
    """Break symmetry of a connected undirected graph.

    Each bidirectional pair independently becomes one-directional with
    probability `p_asym` (surviving direction chosen by fair coin).
    Redraws until the result is strongly connected.  `p_asym` = 0 returns
    the input unchanged.
    """
    if not 0.0 <= p_asym < 1.0:
        raise ValueError("p_asym must lie in [0, 1)")
    if not g.is_symmetric():
        raise ValueError("directify needs a symmetric input graph")
    if not is_strongly_connected(g):
        raise ValueError("directify needs a connected input graph")
    if p_asym == 0.0:
        return g
    pairs = sorted({(min(i, j), max(i, j)) for (i, j) in g.edges})
    for _ in range(retries):
        edges = set()
        for (i, j) in pairs:
            if rng.random() < p_asym:
                if rng.random() < 0.5:
                    edges.add((i, j))
                else:
                    edges.add((j, i))
            else:
                edges.add((i, j))
                edges.add((j, i))
        cand = DiGraph(g.n, frozenset(edges), coords=g.coords)
        if is_strongly_connected(cand):
            return cand
    raise RetryExhausted(
        f"no strongly connected orientation in {retries} draws "
        f"(p_asym={p_asym:g})", attempts=retries)


def laplacian(a: np.ndarray) -> np.ndarray:
    """Row-sum Laplacian diag(A 1) - A of a weighted adjacency matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency must be square")
    return np.diag(a.sum(axis=1)) - a


# ---- plain-text edge-list serialization ----
#
# Line 1: "n <edge-count>", then one "i j" line per edge (sorted), then
# optional "coord i x y" lines with full-precision floats.  Lines starting
# with '#' and blank lines are ignored on read, so generated files may
# carry comment headers.

def graph_to_text(g: DiGraph) -> str:
    lines = [f"{g.n} {len(g.edges)}"]
    lines.extend(f"{i} {j}" for (i, j) in g.sorted_edges())
    if g.coords is not None:
        for i in range(g.n):
            x, y = g.coords[i]
            lines.append(f"coord {i + 1} {x:.17g} {y:.17g}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> DiGraph:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError("empty graph file")
    head = rows[0].split()
    if len(head) != 2:
        raise ValueError(f"bad header line: {rows[0]!r}")
    n, m = int(head[0]), int(head[1])
    edges = set()
    coords = {}
    for ln in rows[1:]:
        parts = ln.split()
        if parts[0] == "coord":
            if len(parts) != 4:
                raise ValueError(f"bad coord line: {ln!r}")
            coords[int(parts[1])] = (float(parts[2]), float(parts[3]))
        else:
            if len(parts) != 2:
                raise ValueError(f"bad edge line: {ln!r}")
            edges.add((int(parts[0]), int(parts[1])))
    if len(edges) != m:
        raise ValueError(f"header says {m} edges, found {len(edges)}")
    arr = None
    if coords:
        if sorted(coords) != list(range(1, n + 1)):
            raise ValueError("coord lines must cover every node exactly once")
        arr = np.array([coords[i] for i in range(1, n + 1)], dtype=float)
    return DiGraph(n, frozenset(edges), coords=arr)


def save_graph(g: DiGraph, path, header_lines=()) -> None:
    with open(path, "w") as f:
        for ln in header_lines:
            f.write(f"# {ln}\n")
        f.write(graph_to_text(g))


def load_graph(path) -> DiGraph:
    with open(path) as f:
        return graph_from_text(f.read())
