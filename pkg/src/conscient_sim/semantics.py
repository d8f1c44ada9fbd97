"""Semantic category graphs, percepts, and a nearest-prototype classifier.

Categories live on undirected graphs loaded from plain edge lists; semantic
distance between two categories counts edges on a shortest path. Each category
carries a prototype feature vector derived deterministically from the load
seed, and new feature vectors are classified to the nearest prototype. Percept
stores are insertion-ordered memories grouped by category.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import ContractError, GraphParseError, UnknownCategoryError
from .fields import GridCell
from .seeds import derive_seed, make_rng

DEFAULT_FEATURE_DIM = 16

PERCEPT_KINDS = ("observed", "style", "dreamed", "received")

# Two-level taxonomy shipped as the default content graph: five domain hubs in
# a ring, five members each, 30 nodes total.
BUILTIN_CONTENT_EDGES = """\
animal plant
plant vehicle
vehicle instrument
instrument place
place animal
animal dog
animal cat
animal bird
animal fish
animal horse
plant tree
plant flower
plant grass
plant moss
plant fern
vehicle car
vehicle boat
vehicle train
vehicle plane
vehicle bike
instrument drum
instrument flute
instrument violin
instrument piano
instrument cello
place beach
place forest
place city
place mountain
place river
"""

# Default style graph: a ring of eight rendering styles.
BUILTIN_STYLE_EDGES = """\
dark bright
bright vivid
vivid pastel
pastel sepia
sepia noir
noir neon
neon blur
blur dark
"""


@dataclass(frozen=True, eq=False)
class SemanticGraph:
    """Undirected category graph with per-category prototype features."""

    nodes: tuple[str, ...]
    adjacency: dict[str, tuple[str, ...]]
    prototypes: dict[str, np.ndarray]
    feature_dim: int

    def has_node(self, name: str) -> bool:
        return name in self.adjacency

    def neighbors(self, name: str) -> tuple[str, ...]:
        try:
            return self.adjacency[name]
        except KeyError:
            raise UnknownCategoryError(name) from None

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.adjacency.values()) // 2


def load_graph(source: str, seed: int, feature_dim: int = DEFAULT_FEATURE_DIM) -> SemanticGraph:
    """Parse a newline-delimited `nodeA nodeB` edge list into a graph.

    Blank lines and `#` comments are ignored; duplicate edges collapse;
    self-loops and lines without exactly two tokens are parse errors carrying
    the offending line number. Prototypes in [0, 1]^feature_dim are generated
    per node from (seed, node name), so the same source and seed always yield
    the same graph.
    """
    if feature_dim < 1:
        raise ContractError(f"feature_dim must be >= 1, got {feature_dim}")
    nodes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected 'nodeA nodeB', got {line!r}", lineno)
        a, b = parts
        if a == b:
            raise GraphParseError(f"self-loop on {a!r}", lineno)
        nodes.add(a)
        nodes.add(b)
        edges.add((min(a, b), max(a, b)))
    adjacency: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    ordered = tuple(sorted(nodes))
    prototypes = {}
    for name in ordered:
        rng = make_rng(derive_seed(seed, "prototype", name))
        prototypes[name] = rng.random(feature_dim)
    return SemanticGraph(
        nodes=ordered,
        adjacency={n: tuple(sorted(adjacency[n])) for n in ordered},
        prototypes=prototypes,
        feature_dim=feature_dim,
    )


def semantic_distance(graph: SemanticGraph, start: str, end: str) -> Optional[int]:
    """Edge count on a shortest path, or None when unreachable."""
    if not graph.has_node(start):
        raise UnknownCategoryError(start)
    if not graph.has_node(end):
        raise UnknownCategoryError(end)
    if start == end:
        return 0
    seen = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        d = seen[node]
        for nb in graph.neighbors(node):
            if nb in seen:
                continue
            if nb == end:
                return d + 1
            seen[nb] = d + 1
            queue.append(nb)
    return None


def classify(features: np.ndarray, graph: SemanticGraph) -> str:
    """Name of the category whose prototype is nearest in Euclidean distance.

    Exact ties resolve to the lexicographically smallest name.
    """
    feats = np.asarray(features, dtype=float)
    if feats.shape != (graph.feature_dim,):
        raise ContractError(
            f"features shape {feats.shape} does not match feature_dim {graph.feature_dim}"
        )
    if not graph.nodes:
        raise ContractError("cannot classify against an empty graph")
    best = None
    best_d = float("inf")
    for name in graph.nodes:  # sorted, so first strict win is the tie-break
        d = float(np.linalg.norm(feats - graph.prototypes[name]))
        if d < best_d:
            best, best_d = name, d
    assert best is not None
    return best


@dataclass(frozen=True, eq=False)
class Percept:
    """One remembered frame: features plus provenance."""

    id: str
    features: np.ndarray
    category: str
    origin: GridCell
    tick: int
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in PERCEPT_KINDS:
            raise ContractError(f"unknown percept kind {self.kind!r}")
        if self.tick < 0:
            raise ContractError(f"percept tick must be >= 0, got {self.tick}")


class PerceptStore:
    """Insertion-ordered percept memory with category buckets.

    Attaching a percept whose id is already present is a no-op, which makes
    repeated exchanges of the same percept idempotent.
    """

    def __init__(self) -> None:
        self._by_id: dict[str, Percept] = {}
        self._order: list[Percept] = []
        self._by_category: dict[str, list[Percept]] = {}

    def attach(self, percept: Percept) -> bool:
        if percept.id in self._by_id:
            return False
        self._by_id[percept.id] = percept
        self._order.append(percept)
        self._by_category.setdefault(percept.category, []).append(percept)
        return True

    def __len__(self) -> int:
        return len(self._order)

    def __iter__(self) -> Iterator[Percept]:
        return iter(self._order)

    def __contains__(self, percept_id: str) -> bool:
        return percept_id in self._by_id

    def get(self, percept_id: str) -> Optional[Percept]:
        return self._by_id.get(percept_id)

    def categories(self) -> tuple[str, ...]:
        """Sorted category names that currently hold at least one percept."""
        return tuple(sorted(self._by_category))

    def in_category(self, category: str) -> tuple[Percept, ...]:
        return tuple(self._by_category.get(category, ()))

    def latest(self, kinds: Optional[Iterable[str]] = None) -> Optional[Percept]:
        """Most recently attached percept, optionally restricted to kinds."""
        if kinds is None:
            return self._order[-1] if self._order else None
        wanted = frozenset(kinds)
        for p in reversed(self._order):
            if p.kind in wanted:
                return p
        return None
