"""Random bipartite gadget graphs and their desk-scale statistics.

The base graph on n + m' vertices per side is drawn from d-1 uniform perfect
matchings of the full sides plus one extra matching of the degree-d core
W+ <-> W-; parallel edges are collapsed.  The side sets U+- of m' vertices
keep degree d-1 and serve as the attachment points for (d-1)-ary trees of
even depth whose roots V+- are the ports used to wire gadget copies together
in the outer construction.

Graph files are line oriented:

    hgg 1 <num_vertices> <d>
    v <id> <label> <gadget_index>
    e <u> <v>

Labels are W+, W-, U+, U-, V+, V-, T+ and T- (tree-internal with side).
Cross edges in the wired graph are recoverable as the edges joining distinct
gadget indices, so they are not stored separately.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import CapacityError, ConsistencyError, DomainError, ParseError, ResourceError

FORMAT_VERSION = 1

PLUS_LABELS = {"W+", "U+", "V+", "T+"}
MINUS_LABELS = {"W-", "U-", "V-", "T-"}
ALL_LABELS = PLUS_LABELS | MINUS_LABELS


@dataclass(frozen=True)
class GadgetSpec:
    """Sizing of one gadget: core size n per side, port exponents theta and
    psi in (0, 1/8), degree bound d, RNG seed, and the derived counts
    m = (d-1)^floor(theta log_{d-1} n) tree roots per side,
    tree_depth = 2 floor((psi/2) log_{d-1} n) and m' = m (d-1)^tree_depth
    leaves per side."""

    n: int
    theta: float
    psi: float
    d: int
    seed: int
    m: int
    tree_depth: int
    m_prime: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.d < 3:
            raise DomainError(f"d must be >= 3, got {self.d}")
        if not (0 < self.theta < 0.125 and 0 < self.psi < 0.125):
            raise DomainError("theta and psi must lie in (0, 1/8)")
        if self.tree_depth % 2 != 0:
            raise ConsistencyError(f"tree depth must be even, got {self.tree_depth}")
        if self.m_prime != self.m * (self.d - 1) ** self.tree_depth:
            raise ConsistencyError("m' != m (d-1)^tree_depth")

    @classmethod
    def from_params(cls, n: int, theta: float, psi: float, d: int, seed: int,
                    roots: Optional[int] = None) -> "GadgetSpec":
        """Derive the counts from (n, theta, psi).

        `roots` overrides the derived m for desk-scale experiments that need
        more ports than the asymptotic sizing yields at small n (e.g. wiring
        a triangle when deg * k exceeds the derived m); the override is
        reported by the consumers that care.
        """
        if n < 2:
            raise DomainError("n must be >= 2 to size a gadget")
        log_n = math.log(n, d - 1)
        m = (d - 1) ** int(math.floor(theta * log_n))
        depth = 2 * int(math.floor((psi / 2.0) * log_n))
        if roots is not None:
            if roots < 1:
                raise DomainError("roots override must be >= 1")
            m = roots
        return cls(n=n, theta=theta, psi=psi, d=d, seed=seed,
                   m=m, tree_depth=depth, m_prime=m * (d - 1) ** depth)


class Graph:
    """Labeled simple graph with adjacency sets.

    Vertices are 0..n_vertices-1; `labels[v]` is one of the gadget labels and
    `gadget_index[v]` identifies the copy a vertex belongs to (0 for a lone
    gadget)."""

    def __init__(self, n_vertices: int, d: int):
        self.n_vertices = n_vertices
        self.d = d
        self.adj = [set() for _ in range(n_vertices)]
        self.labels = ["W+"] * n_vertices
        self.gadget_index = [0] * n_vertices
        self.collapsed_parallel = 0
        self.collapsed_parallel_w = 0

    # -- construction ---------------------------------------------------
    def add_edge(self, u: int, v: int) -> bool:
        """Add edge; returns False (and counts the collapse) if present."""
        if u == v:
            raise ConsistencyError(f"self-loop at {u}")
        if v in self.adj[u]:
            self.collapsed_parallel += 1
            if self.labels[u].startswith("W") and self.labels[v].startswith("W"):
                self.collapsed_parallel_w += 1
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        return True

    def add_vertices(self, count: int, label: str, gadget: int = 0) -> range:
        start = self.n_vertices
        self.n_vertices += count
        self.adj.extend(set() for _ in range(count))
        self.labels.extend([label] * count)
        self.gadget_index.extend([gadget] * count)
        return range(start, start + count)

    # -- queries ---------------------------------------------------------
    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def edges(self):
        for u in range(self.n_vertices):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def vertices_with_label(self, label: str, gadget: Optional[int] = None) -> list:
        return [v for v in range(self.n_vertices)
                if self.labels[v] == label
                and (gadget is None or self.gadget_index[v] == gadget)]

    def vertices_with_labels(self, labels: Iterable[str]) -> list:
        labels = set(labels)
        return [v for v in range(self.n_vertices) if self.labels[v] in labels]

    def cross_edges(self) -> list:
        """Edges joining distinct gadget copies."""
        return [(u, v) for u, v in self.edges()
                if self.gadget_index[u] != self.gadget_index[v]]

    def two_coloring(self) -> Optional[list]:
        """A proper 2-coloring, or None if the graph is not bipartite."""
        color = [None] * self.n_vertices
        for s in range(self.n_vertices):
            if color[s] is not None:
                continue
            color[s] = 0
            queue = [s]
            while queue:
                u = queue.pop()
                for v in self.adj[u]:
                    if color[v] is None:
                        color[v] = 1 - color[u]
                        queue.append(v)
                    elif color[v] == color[u]:
                        return None
        return color

    def structurally_equal(self, other: "Graph") -> bool:
        return (self.n_vertices == other.n_vertices and self.d == other.d
                and self.labels == other.labels
                and self.gadget_index == other.gadget_index
                and self.adj == other.adj)


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def sample_core(spec: GadgetSpec) -> Graph:
    """Sample the matching-based bipartite core.

    Plus side is W+ (ids [0, n)) then U+ ([n, n+m')); minus side W-
    ([n+m', n+m'+n)) then U-.  d-1 uniform matchings join the full sides and
    one more joins W+ with W-; parallel edges collapse to simple edges and
    the collapse counts are kept for multigraph-versus-simple reporting.
    """
    n, mp, d = spec.n, spec.m_prime, spec.d
    side = n + mp
    g = Graph(2 * side, d)
    for v in range(n, side):
        g.labels[v] = "U+"
    for v in range(side, side + n):
        g.labels[v] = "W-"
    for v in range(side + n, 2 * side):
        g.labels[v] = "U-"
    rng = random.Random(spec.seed)
    mult = {}
    minus = list(range(side, 2 * side))
    for _ in range(d - 1):
        rng.shuffle(minus)
        for i in range(side):
            g.add_edge(i, minus[i])
            mult[(i, minus[i])] = mult.get((i, minus[i]), 0) + 1
    wminus = list(range(side, side + n))
    rng.shuffle(wminus)
    for i in range(n):
        g.add_edge(i, wminus[i])
        mult[(i, wminus[i])] = mult.get((i, wminus[i]), 0) + 1
    # pairs of parallel edges are the length-2 cycles of the multigraph
    g.collapsed_parallel = sum(c - 1 for c in mult.values() if c > 1)
    g.collapsed_parallel_w = sum(
        c * (c - 1) // 2 for (u, v), c in mult.items()
        if c > 1 and u < n and v < side + n)
    return g


def append_trees(core: Graph, spec: GadgetSpec) -> Graph:
    """Adjoin m disjoint (d-1)-ary trees of the spec depth per side, with the
    leaf level identified with U+- in index order; roots become V+-.

    With depth 0 the ports coincide with the attachment points and U+- are
    simply relabeled V+-.  Tree-internal vertices end up with degree d (one
    parent, d-1 children) and the former U vertices gain exactly one edge.
    """
    d, depth, m = spec.d, spec.tree_depth, spec.m
    for side_label, root_label, internal_label in (("U+", "V+", "T+"), ("U-", "V-", "T-")):
        leaves = core.vertices_with_label(side_label)
        if len(leaves) != m * (d - 1) ** depth:
            raise ConsistencyError(
                f"{side_label} has {len(leaves)} vertices, expected "
                f"{m * (d - 1) ** depth} = m (d-1)^depth")
        if depth == 0:
            for v in leaves:
                core.labels[v] = root_label
            continue
        per_tree = (d - 1) ** depth
        for t in range(m):
            tree_leaves = leaves[t * per_tree:(t + 1) * per_tree]
            # build levels root..depth-1 as new vertices, level `depth` are
            # the existing leaves
            gadget_id = core.gadget_index[tree_leaves[0]]
            root = core.add_vertices(1, root_label, gadget=gadget_id)[0]
            level = [root]
            for lvl in range(1, depth + 1):
                if lvl == depth:
                    nxt = tree_leaves
                else:
                    nxt = list(core.add_vertices((d - 1) ** lvl, internal_label,
                                                 gadget=gadget_id))
                for idx, child in enumerate(nxt):
                    core.add_edge(level[idx // (d - 1)], child)
                level = nxt
    return core


def build_gadget(spec: GadgetSpec) -> Graph:
    """sample_core followed by append_trees."""
    return append_trees(sample_core(spec), spec)


def build_hg(h: Graph, gadget: Graph, k: int) -> Graph:
    """Wire |H| copies of the gadget along the edges of H.

    Every H-edge (x, y) receives k deterministic cross edges between the V+
    ports of copies x and y and k between the V- ports.  Ports are consumed
    round-robin in index order so no vertex gains more than one edge; running
    out of spare ports raises CapacityError.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    copies = h.n_vertices
    size = gadget.n_vertices
    hg = Graph(copies * size, gadget.d)
    for x in range(copies):
        off = x * size
        for v in range(size):
            hg.labels[off + v] = gadget.labels[v]
            hg.gadget_index[off + v] = x
        for u, v in gadget.edges():
            hg.add_edge(off + u, off + v)
    ports = {}
    for x in range(copies):
        for sign in "+-":
            plist = [x * size + v for v in gadget.vertices_with_label(f"V{sign}")]
            ports[(x, sign)] = (plist, [0])  # (sorted ports, next-free cursor)
    for x, y in sorted(h.edges()):
        for sign in "+-":
            px, cx = ports[(x, sign)]
            py, cy = ports[(y, sign)]
            if cx[0] + k > len(px) or cy[0] + k > len(py):
                raise CapacityError(
                    f"V{sign} ports exhausted wiring H-edge ({x}, {y}): "
                    f"need {k}, have {len(px) - cx[0]}/{len(py) - cy[0]} spare")
            for t in range(k):
                hg.add_edge(px[cx[0] + t], py[cy[0] + t])
            cx[0] += k
            cy[0] += k
    return hg


# ---------------------------------------------------------------------------
# Short-cycle statistics
# ---------------------------------------------------------------------------

def proper_colorings_of_cycle(d: int, i: int) -> int:
    """r(d, i) = (d-1)^i + (-1)^i (d-1), the chromatic evaluation for C_i."""
    if i < 2:
        raise DomainError("cycle length must be >= 2")
    return (d - 1) ** i + (-1) ** i * (d - 1)


@dataclass(frozen=True)
class CycleStats:
    length: int
    count: int
    lambda_mean: float           # r(d, i) / i
    delta_perturbation: Optional[float] = None

    @staticmethod
    def delta_for(alpha: float, beta: float, i: int) -> float:
        return (alpha * beta / ((1 - alpha) * (1 - beta))) ** (i / 2)


def _count_4cycles_in_w(g: Graph) -> int:
    # Each 4-cycle is counted once per diagonal pair {u, v} (there are two),
    # as C(codeg(u, v), 2); halving recovers the cycle count regardless of
    # how the W labels split across the sides.
    is_w = [lbl in ("W+", "W-") for lbl in g.labels]
    total = 0
    for u in range(g.n_vertices):
        if not is_w[u]:
            continue
        codeg = {}
        for x in g.adj[u]:
            if not is_w[x]:
                continue
            for v in g.adj[x]:
                if v > u and is_w[v]:
                    codeg[v] = codeg.get(v, 0) + 1
        total += sum(c * (c - 1) // 2 for c in codeg.values())
    return total // 2


def _count_cycles_dfs(g: Graph, i_max: int) -> dict:
    """Exact simple-cycle counts by canonical DFS (vertices restricted to W).

    Cycles are rooted at their smallest vertex and deduplicated by
    orientation (second vertex below last).  Exponential in i_max; intended
    for small graphs or small i_max.
    """
    is_w = [lbl in ("W+", "W-") for lbl in g.labels]
    counts = {i: 0 for i in range(3, i_max + 1)}
    adj = [sorted(x for x in g.adj[v] if is_w[x]) for v in range(g.n_vertices)]
    on_path = [False] * g.n_vertices

    def dfs(start, u, length, second):
        for v in adj[u]:
            if v == start and length >= 3 and second < u:
                counts[length] += 1
            if v <= start or on_path[v] or length >= i_max:
                continue
            on_path[v] = True
            dfs(start, v, length + 1, second)
            on_path[v] = False

    for s in range(g.n_vertices):
        if not is_w[s]:
            continue
        on_path[s] = True
        for v in adj[s]:
            if v < s:
                continue
            on_path[v] = True
            dfs(s, v, 2, v)
            on_path[v] = False
        on_path[s] = False
    return counts


def count_short_cycles(g: Graph, i_max: int,
                       alpha_beta: Optional[tuple] = None) -> list:
    """Exact counts of simple W-cycles of each even length <= i_max.

    Length 2 reports the parallel W-edge pairs collapsed during sampling
    (the cycle of length two only exists in the matching multigraph).
    Length 4 uses a codegree count; longer lengths use DFS enumeration,
    whose cost grows steeply: i_max is capped at 12.
    """
    if i_max > 12:
        raise ResourceError("i_max capped at 12")
    out = []
    dfs_counts = None
    for i in range(2, i_max + 1, 2):
        if i == 2:
            cnt = g.collapsed_parallel_w
        elif i == 4:
            cnt = _count_4cycles_in_w(g)
        else:
            if dfs_counts is None:
                dfs_counts = _count_cycles_dfs(g, i_max)
            cnt = dfs_counts[i]
        delta = None
        if alpha_beta is not None:
            delta = CycleStats.delta_for(alpha_beta[0], alpha_beta[1], i)
        out.append(CycleStats(
            length=i, count=cnt,
            lambda_mean=proper_colorings_of_cycle(g.d, i) / i,
            delta_perturbation=delta))
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def serialize_graph(g: Graph) -> str:
    lines = [f"hgg {FORMAT_VERSION} {g.n_vertices} {g.d}"]
    for v in range(g.n_vertices):
        lines.append(f"v {v} {g.labels[v]} {g.gadget_index[v]}")
    for u, v in sorted(g.edges()):
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def deserialize_graph(text: str) -> Graph:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty graph file", line=1)
    head = lines[0].split()
    if len(head) != 4 or head[0] != "hgg":
        raise ParseError("expected header 'hgg <version> <num_vertices> <d>'", line=1)
    try:
        version, n, d = int(head[1]), int(head[2]), int(head[3])
    except ValueError:
        raise ParseError("non-integer header field", line=1)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {version}", line=1)
    g = Graph(n, d)
    seen_v = [False] * n
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "v":
            if len(parts) != 4:
                raise ParseError("vertex line needs 'v <id> <label> <gadget_index>'",
                                 line=lineno)
            try:
                vid, gidx = int(parts[1]), int(parts[3])
            except ValueError:
                raise ParseError("non-integer vertex field", line=lineno)
            if not 0 <= vid < n:
                raise ParseError(f"vertex id {vid} out of range", line=lineno)
            if parts[2] not in ALL_LABELS:
                raise ParseError(f"unknown label {parts[2]!r}", line=lineno)
            g.labels[vid] = parts[2]
            g.gadget_index[vid] = gidx
            seen_v[vid] = True
        elif parts[0] == "e":
            if len(parts) != 3:
                raise ParseError("edge line needs 'e <u> <v>'", line=lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError("non-integer edge endpoint", line=lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"edge ({u}, {v}) out of range", line=lineno)
            g.add_edge(u, v)
        else:
            raise ParseError(f"unknown record type {parts[0]!r}", line=lineno)
    if n and not all(seen_v):
        missing = seen_v.index(False)
        raise ParseError(f"vertex {missing} has no 'v' line", line=len(lines))
    return g


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_graph(g))


def read_graph(path) -> Graph:
    with open(path) as fh:
        return deserialize_graph(fh.read())


def path_graph(n: int, d: int = 3) -> Graph:
    g = Graph(n, d)
    for i in range(n - 1):
        g.add_edge(i, i + 1)
    return g


def cycle_graph(n: int, d: int = 3) -> Graph:
    g = path_graph(n, d)
    if n > 2:
        g.add_edge(n - 1, 0)
    return g


def complete_graph(n: int, d: Optional[int] = None) -> Graph:
    g = Graph(n, d if d is not None else max(3, n - 1))
    for i in range(n):
        for j in range(i + 1, n):
            g.add_edge(i, j)
    return g
