"""Heavy-hex derived HUBO benchmark instances.

The construction starts from a heavy-hexagonal lattice (degree <= 3,
row-major vertex order), builds conflict graphs whose vertices are the
candidate two- and three-body interactions, colors them greedily into
parallel-executable sets, accumulates the first few color classes into the
instance, permutes the lattice with the first two-body set (SWAP), repeats,
and finally samples coupling values from a heavy-tailed distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import HuboInstance

HEAVY_HEX_ROWS = 8
HEAVY_HEX_ROW_LENGTH = 16
HEAVY_HEX_MAX_N = 156  # 8 rows of 16 plus 7 connector rows of 4
HEAVY_HEX_MIN_N = 12
# connector columns alternate between consecutive connector rows
_CONNECTOR_OFFSETS = ((3, 7, 11, 15), (1, 5, 9, 13))


def _canon_edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class TopologyGraph:
    """Simple undirected graph with integer vertices."""

    vertices: frozenset
    edges: frozenset

    def __post_init__(self):
        verts = frozenset(int(v) for v in self.vertices)
        edges = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"loop edge ({a},{b})")
            if a not in verts or b not in verts:
                raise ValueError(f"edge ({a},{b}) endpoint not a vertex")
            edges.add(_canon_edge(int(a), int(b)))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", frozenset(edges))

    def neighbors(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        adj = self.neighbors()
        start = next(iter(self.vertices))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.vertices)


def build_heavy_hex(target_n: int) -> TopologyGraph:
    """Heavy-hex lattice on the first ``target_n`` vertices.

    The full 156-vertex lattice is 8 rows of 16 qubits joined by connector
    qubits at alternating column offsets.  Vertices are numbered row-major:
    row 0, its connector row, row 1, and so on.  Smaller sizes are the
    induced subgraph on the first ``target_n`` vertices of that ordering.
    """
    if target_n > HEAVY_HEX_MAX_N:
        raise ValueError(f"target_n={target_n} exceeds lattice size {HEAVY_HEX_MAX_N}")
    if target_n < HEAVY_HEX_MIN_N:
        raise ValueError(f"target_n={target_n} below minimum {HEAVY_HEX_MIN_N}")

    row_start = {}
    next_id = 0
    for r in range(HEAVY_HEX_ROWS):
        row_start[r] = next_id
        next_id += HEAVY_HEX_ROW_LENGTH
        if r < HEAVY_HEX_ROWS - 1:
            next_id += len(_CONNECTOR_OFFSETS[r % 2])

    edges = set()
    for r in range(HEAVY_HEX_ROWS):
        base = row_start[r]
        for c in range(HEAVY_HEX_ROW_LENGTH - 1):
            edges.add((base + c, base + c + 1))
        if r < HEAVY_HEX_ROWS - 1:
            conn_base = base + HEAVY_HEX_ROW_LENGTH
            below = row_start[r + 1]
            for k, col in enumerate(_CONNECTOR_OFFSETS[r % 2]):
                conn = conn_base + k
                edges.add((base + col, conn))
                edges.add((conn, below + col))

    keep = set(range(target_n))
    kept_edges = {(a, b) for a, b in edges if a in keep and b in keep}
    return TopologyGraph(vertices=frozenset(keep), edges=frozenset(kept_edges))


def conflict_graph_2body(c: TopologyGraph) -> TopologyGraph:
    """Conflict graph whose vertex i is the i-th edge of sorted(c.edges);
    two interactions conflict when they share a lattice vertex."""
    items = sorted(c.edges)
    conflicts = set()
    for i in range(len(items)):
        si = set(items[i])
        for j in range(i + 1, len(items)):
            if si & set(items[j]):
                conflicts.add((i, j))
    return TopologyGraph(
        vertices=frozenset(range(len(items))), edges=frozenset(conflicts)
    )


def conflict_graph_3body(c: TopologyGraph):
    """Enumerate three-body interactions and their conflict graph.

    For every vertex v, each unordered pair of its neighbors (u, w) yields
    the interaction (v, u, w): a triangle when u and w are adjacent, a
    three-vertex path otherwise.  Returns (conflict graph, interaction
    list); conflict-graph vertex i is the i-th interaction.
    """
    adj = c.neighbors()
    triples = []
    for v in sorted(c.vertices):
        nbrs = sorted(adj[v])
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                triples.append((v, nbrs[a], nbrs[b]))
    conflicts = set()
    for i in range(len(triples)):
        si = set(triples[i])
        for j in range(i + 1, len(triples)):
            if si & set(triples[j]):
                conflicts.add((i, j))
    graph = TopologyGraph(
        vertices=frozenset(range(len(triples))), edges=frozenset(conflicts)
    )
    return graph, triples


def color_graph(g: TopologyGraph) -> list:
    """Greedy proper coloring, largest degree first; classes come back
    ordered by descending size (ties by first color used)."""
    adj = g.neighbors()
    order = sorted(g.vertices, key=lambda v: (-len(adj[v]), v))
    color_of = {}
    classes: list = []
    for v in order:
        used = {color_of[u] for u in adj[v] if u in color_of}
        color = 0
        while color in used:
            color += 1
        color_of[v] = color
        if color == len(classes):
            classes.append([])
        classes[color].append(v)
    for cls in classes:
        cls.sort()
    return sorted(classes, key=lambda cls: -len(cls))


def apply_swap(c: TopologyGraph, pairs) -> TopologyGraph:
    """Relabel each pair (a, b) as a <-> b; pairs must be vertex-disjoint."""
    perm = {}
    for a, b in pairs:
        if a in perm or b in perm:
            raise ValueError("swap pairs overlap")
        if a not in c.vertices or b not in c.vertices:
            raise ValueError(f"swap pair ({a},{b}) not in graph")
        perm[a] = b
        perm[b] = a
    edges = {
        _canon_edge(perm.get(a, a), perm.get(b, b)) for a, b in c.edges
    }
    return TopologyGraph(vertices=c.vertices, edges=frozenset(edges))


@dataclass(frozen=True)
class Cauchy:
    """Standard Cauchy coupling distribution."""


@dataclass(frozen=True)
class SymmetrizedPareto:
    """Pareto(alpha, x_min) magnitude with an independent uniform sign."""

    alpha: float = 1.0
    x_min: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.x_min <= 0:
            raise ValueError("SymmetrizedPareto requires alpha > 0 and x_min > 0")


def sample_coupling(dist, rng: np.random.Generator) -> float:
    """One coupling draw; magnitude before sign for the Pareto case."""
    if isinstance(dist, Cauchy):
        return float(rng.standard_cauchy())
    if isinstance(dist, SymmetrizedPareto):
        magnitude = dist.x_min * (1.0 + rng.pareto(dist.alpha))
        sign = 1.0 if rng.integers(0, 2) == 1 else -1.0
        return float(sign * magnitude)
    raise ValueError(f"unknown distribution {dist!r}")


@dataclass(frozen=True)
class GeneratorConfig:
    s2q: int = 1
    s3q: int = 4
    n_swap: int = 1
    distribution: object = field(default_factory=Cauchy)
    target_n: int = HEAVY_HEX_MAX_N
    seed: int = 0

    def __post_init__(self):
        if self.n_swap >= 1 and self.s2q < 1:
            raise ValueError("s2q must be >= 1 when SWAP iterations are enabled")
        if self.s2q < 0 or self.s3q < 0 or self.n_swap < 0:
            raise ValueError("counts must be non-negative")

    def describe(self) -> dict:
        dist = (
            {"name": "cauchy"}
            if isinstance(self.distribution, Cauchy)
            else {
                "name": "symmetrized_pareto",
                "alpha": self.distribution.alpha,
                "x_min": self.distribution.x_min,
            }
        )
        return {
            "s2q": self.s2q,
            "s3q": self.s3q,
            "n_swap": self.n_swap,
            "distribution": dist,
            "target_n": self.target_n,
            "seed": self.seed,
        }


def interaction_sets(config: GeneratorConfig):
    """Accumulated two- and three-body interaction sets (before sampling)."""
    c = build_heavy_hex(config.target_n)
    g2: set = set()
    g3: set = set()
    for round_idx in range(config.n_swap + 1):
        edge_items = sorted(c.edges)
        classes2 = color_graph(conflict_graph_2body(c))
        if config.s2q > len(classes2):
            raise ValueError(
                f"s2q={config.s2q} exceeds {len(classes2)} two-body color classes "
                f"in round {round_idx}"
            )
        cg3, triple_items = conflict_graph_3body(c)
        classes3 = color_graph(cg3)
        if config.s3q > len(classes3):
            raise ValueError(
                f"s3q={config.s3q} exceeds {len(classes3)} three-body color classes "
                f"in round {round_idx}"
            )
        for cls in classes2[: config.s2q]:
            g2.update(edge_items[i] for i in cls)
        for cls in classes3[: config.s3q]:
            g3.update(tuple(sorted(triple_items[i])) for i in cls)
        if round_idx < config.n_swap:
            swap_pairs = [edge_items[i] for i in classes2[0]]
            c = apply_swap(c, swap_pairs)
    return g2, g3


def generate_hubo(config: GeneratorConfig) -> HuboInstance:
    """Full instance generation: topology rounds, then coupling sampling.

    Deterministic for a fixed config: couplings are drawn sequentially over
    the sorted two-body set, then the sorted three-body set.
    """
    g2, g3 = interaction_sets(config)
    rng = np.random.default_rng(config.seed)
    pair_terms = {pair: sample_coupling(config.distribution, rng) for pair in sorted(g2)}
    triple_terms = {
        triple: sample_coupling(config.distribution, rng) for triple in sorted(g3)
    }
    return HuboInstance(
        n=config.target_n,
        pair_terms=pair_terms,
        triple_terms=triple_terms,
        metadata={"generator": config.describe()},
    )


# the two instance families studied throughout: four or six three-body sets,
# one SWAP, heavy-tailed couplings
def instance_type_config(name: str, target_n: int, seed: int, alpha: float = 1.0):
    if name == "cauchy4":
        return GeneratorConfig(
            s2q=1, s3q=4, n_swap=1, distribution=Cauchy(), target_n=target_n, seed=seed
        )
    if name == "pareto6":
        return GeneratorConfig(
            s2q=1,
            s3q=6,
            n_swap=1,
            distribution=SymmetrizedPareto(alpha=alpha),
            target_n=target_n,
            seed=seed,
        )
    raise ValueError(f"unknown instance type {name!r} (expected cauchy4 or pareto6)")
