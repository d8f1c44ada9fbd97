"""Dream generation: paired random walks over content and style graphs.

A dream is a sequence of frames. Each frame takes one random walk step on the
content graph and one on the style graph (step sizes drawn uniformly from an
integer interval), picks a stored percept at each resulting category, and
blends their features. The walk over categories is what gives dreams their
drift; the blend weight decides how strongly style tints content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, ContractError, EmptyStoreError, UnknownCategoryError
from .fields import GridCell, ValueField
from .semantics import Percept, PerceptStore, SemanticGraph, semantic_distance


@dataclass(frozen=True)
class DreamConfig:
    step_lower: int = 1
    step_upper: int = 3
    length: int = 8
    style_weight: float = 0.5

    def __post_init__(self) -> None:
        if self.step_lower < 0 or self.step_upper < 0:
            raise ConfigError("dream step bounds must be >= 0")
        if self.step_lower > self.step_upper:
            raise ConfigError(
                f"dream.step_lower {self.step_lower} exceeds step_upper {self.step_upper}"
            )
        if self.length < 0:
            raise ConfigError(f"dream.length must be >= 0, got {self.length}")
        if not (0.0 <= self.style_weight <= 1.0):
            raise ConfigError(f"dream.style_weight must be in [0, 1], got {self.style_weight}")


@dataclass(eq=False)
class DreamFrame:
    features: np.ndarray
    content_category: str
    style_category: str
    content_origin: GridCell
    # Edge distance between successive frame categories; None when unreachable.
    pair_distance: Optional[int] = None


@dataclass(eq=False)
class Dream:
    frames: list[DreamFrame]
    start_tick: int = 0

    def __len__(self) -> int:
        return len(self.frames)


def sample_step_size(config: DreamConfig, rng: np.random.Generator) -> int:
    """Integer step size drawn uniformly from [step_lower, step_upper]."""
    return int(rng.integers(config.step_lower, config.step_upper + 1))


def walk_step(graph: SemanticGraph, current: str, omega: int, rng: np.random.Generator) -> str:
    """Take `omega` uniform neighbor hops from `current`; isolated nodes stay put.

    The endpoint is always within `omega` edges of the start.
    """
    if omega < 0:
        raise ContractError(f"walk length must be >= 0, got {omega}")
    node = current
    if not graph.has_node(node):
        raise UnknownCategoryError(node)
    for _ in range(omega):
        nbrs = graph.neighbors(node)
        if not nbrs:
            break
        node = nbrs[int(rng.integers(len(nbrs)))]
    return node


def blend(content: Percept, style: Percept, style_weight: float) -> DreamFrame:
    """Mix content and style features: (1 - w) * content + w * style.

    Inputs in [0, 1] stay in [0, 1]. Categories and origin are copied from the
    sources; pair_distance is filled in by the walk that produced the frame.
    """
    if not (0.0 <= style_weight <= 1.0):
        raise ConfigError(f"style_weight must be in [0, 1], got {style_weight}")
    if content.features.shape != style.features.shape:
        raise ContractError(
            f"feature shapes differ: {content.features.shape} vs {style.features.shape}"
        )
    mixed = (1.0 - style_weight) * content.features + style_weight * style.features
    return DreamFrame(
        features=mixed,
        content_category=content.category,
        style_category=style.category,
        content_origin=content.origin,
    )


def _nearest_populated(graph: SemanticGraph, start: str, store: PerceptStore) -> str:
    """Closest category (by BFS) holding at least one percept.

    Ties at the same distance resolve lexicographically; if nothing populated
    is reachable, the smallest populated category overall is used.
    """
    populated = set(store.categories())
    if start in populated:
        return start
    seen = {start}
    frontier = [start]
    while frontier:
        nxt: list[str] = []
        hits: list[str] = []
        for node in frontier:
            for nb in graph.neighbors(node):
                if nb in seen:
                    continue
                seen.add(nb)
                nxt.append(nb)
                if nb in populated:
                    hits.append(nb)
        if hits:
            return min(hits)
        frontier = nxt
    return min(populated)


class DreamWalk:
    """Incremental dream state: current categories on both graphs.

    Initial categories are drawn uniformly from the categories that hold at
    least one stored percept. Stores are read live, so percepts attached while
    the walk is in progress become eligible for later frames.
    """

    def __init__(
        self,
        content_store: PerceptStore,
        content_graph: SemanticGraph,
        style_store: PerceptStore,
        style_graph: SemanticGraph,
        config: DreamConfig,
        rng: np.random.Generator,
    ) -> None:
        if len(content_store) == 0:
            raise EmptyStoreError("content store is empty, nothing to dream about")
        if len(style_store) == 0:
            raise EmptyStoreError("style store is empty, nothing to dream with")
        self.content_store = content_store
        self.content_graph = content_graph
        self.style_store = style_store
        self.style_graph = style_graph
        self.config = config
        cats = content_store.categories()
        self._content_cat = cats[int(rng.integers(len(cats)))]
        scats = style_store.categories()
        self._style_cat = scats[int(rng.integers(len(scats)))]
        self._prev_frame_cat = self._content_cat

    def _pick(
        self,
        store: PerceptStore,
        graph: SemanticGraph,
        category: str,
        rng: np.random.Generator,
    ) -> Percept:
        cands = store.in_category(category)
        if not cands:
            cands = store.in_category(_nearest_populated(graph, category, store))
        return cands[int(rng.integers(len(cands)))]

    def step(
        self,
        rng: np.random.Generator,
        step_bounds: Optional[tuple[int, int]] = None,
    ) -> DreamFrame:
        """Advance both walks one frame; emotion hooks may override step bounds."""
        if step_bounds is None:
            lo, hi = self.config.step_lower, self.config.step_upper
        else:
            lo, hi = step_bounds
            if lo < 0 or lo > hi:
                raise ContractError(f"bad step bounds ({lo}, {hi})")
        omega_c = int(rng.integers(lo, hi + 1))
        self._content_cat = walk_step(self.content_graph, self._content_cat, omega_c, rng)
        omega_s = int(rng.integers(lo, hi + 1))
        self._style_cat = walk_step(self.style_graph, self._style_cat, omega_s, rng)
        content_p = self._pick(self.content_store, self.content_graph, self._content_cat, rng)
        style_p = self._pick(self.style_store, self.style_graph, self._style_cat, rng)
        frame = blend(content_p, style_p, self.config.style_weight)
        frame.pair_distance = semantic_distance(
            self.content_graph, self._prev_frame_cat, frame.content_category
        )
        self._prev_frame_cat = frame.content_category
        return frame


def dream(
    content_store: PerceptStore,
    content_graph: SemanticGraph,
    style_store: PerceptStore,
    style_graph: SemanticGraph,
    config: DreamConfig,
    rng: np.random.Generator,
) -> Dream:
    """Generate config.length frames in one go. Stores must be non-empty."""
    walk = DreamWalk(content_store, content_graph, style_store, style_graph, config, rng)
    return Dream(frames=[walk.step(rng) for _ in range(config.length)])


def dream_valence(
    frame: DreamFrame, field: ValueField, theta_high: float, theta_low: float
) -> int:
    """Score a frame against a field: +1 above theta_high, -1 below theta_low.

    The frame is judged by the field value at its content origin, the place
    the dreamed content was originally perceived.
    """
    if not (math.isfinite(theta_high) and math.isfinite(theta_low)):
        raise ConfigError("valence thresholds must be finite")
    if theta_low > theta_high:
        raise ConfigError(f"valence thresholds out of order: {theta_low} > {theta_high}")
    v = field.value_at(frame.content_origin)
    if v > theta_high:
        return 1
    if v < theta_low:
        return -1
    return 0
