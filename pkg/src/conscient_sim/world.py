"""World assembly and the tick scheduler.

A world holds n agents on a shared r x r grid. Each agent perceives the grid
through its own sampled importance field; the environment itself contributes
reward hotspots (positive bumps on every field) and one-shot content stimuli
scattered over cells. Per tick, agents act in ascending id order, then every
unordered pair of awake co-located agents exchanges percepts exactly once.
The full run is captured in a replayable trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .agents import Agent, AgentConfig, agent_tick, most_recent_sendable, receive_percept
from .errors import ConfigError
from .fields import MAX_RESOLUTION, GridCell, local_bump, sample_field
from .seeds import derive_seed, make_rng
from .semantics import (
    BUILTIN_CONTENT_EDGES,
    BUILTIN_STYLE_EDGES,
    SemanticGraph,
    load_graph,
)

STIMULUS_MODALITIES = ("music", "recipe")


@dataclass(frozen=True)
class WorldConfig:
    resolution: int = 16
    n_agents: int = 2
    total_ticks: int = 500
    reward_count: int = 3
    reward_peak: float = 0.8
    reward_width: float = 2.0
    stimulus_probability: float = 0.1
    stimulus_modalities: tuple[str, ...] = STIMULUS_MODALITIES
    feature_dim: int = 16
    master_seed: int = 0
    agent: AgentConfig = dc_field(default_factory=AgentConfig)
    content_edges: str = BUILTIN_CONTENT_EDGES
    style_edges: str = BUILTIN_STYLE_EDGES

    def __post_init__(self) -> None:
        if not (2 <= self.resolution <= MAX_RESOLUTION):
            raise ConfigError(
                f"world.resolution must be in [2, {MAX_RESOLUTION}], got {self.resolution}"
            )
        cells = self.resolution * self.resolution
        if not (1 <= self.n_agents <= cells):
            raise ConfigError(
                f"world.n_agents must be in [1, {cells}] for distinct spawns, "
                f"got {self.n_agents}"
            )
        if self.total_ticks < 0:
            raise ConfigError(f"world.total_ticks must be >= 0, got {self.total_ticks}")
        if not (0 <= self.reward_count <= cells):
            raise ConfigError(
                f"world.reward_count must be in [0, {cells}], got {self.reward_count}"
            )
        if not math.isfinite(self.reward_peak):
            raise ConfigError("world.reward_peak must be finite")
        if not (math.isfinite(self.reward_width) and self.reward_width > 0):
            raise ConfigError(f"world.reward_width must be > 0, got {self.reward_width}")
        if not (0.0 <= self.stimulus_probability <= 1.0):
            raise ConfigError(
                f"world.stimulus_probability must be in [0, 1], "
                f"got {self.stimulus_probability}"
            )
        for m in self.stimulus_modalities:
            if m not in STIMULUS_MODALITIES:
                raise ConfigError(
                    f"world.stimulus_modalities entry {m!r} not one of {STIMULUS_MODALITIES}"
                )
        if len(set(self.stimulus_modalities)) != len(self.stimulus_modalities):
            raise ConfigError("world.stimulus_modalities has duplicates")
        if self.feature_dim < 1:
            raise ConfigError(f"world.feature_dim must be >= 1, got {self.feature_dim}")
        if not (0 <= self.master_seed < 2**64):
            raise ConfigError(
                f"world.master_seed must be an unsigned 64-bit integer, "
                f"got {self.master_seed}"
            )


@dataclass(frozen=True, eq=False)
class ContentStimulus:
    cell: GridCell
    modality: str
    features: np.ndarray
    score: float


@dataclass(frozen=True)
class InteractionRecord:
    tick: int
    agent_a: int
    agent_b: int
    cell: GridCell
    sent_by_a: str
    sent_by_b: str
    eval_by_a: float  # a's field value at the origin of b's percept
    eval_by_b: float


@dataclass(frozen=True)
class TraceRow:
    tick: int
    agent_id: int
    i: int
    j: int
    mode: str
    e_h: float
    e_c: float
    e_f: float
    e_k: float
    fatigue: float
    field_value: float
    events: tuple[str, ...]


@dataclass(frozen=True)
class DreamFrameRow:
    agent_id: int
    tick: int
    frame_index: int
    percept_id: str
    content_category: str
    style_category: str
    origin_i: int
    origin_j: int
    pair_distance: Optional[int]
    valence: int


@dataclass(frozen=True, eq=False)
class PerceptRow:
    agent_id: int
    id: str
    kind: str
    category: str
    i: int
    j: int
    tick: int
    features: np.ndarray


@dataclass(eq=False)
class SimulationTrace:
    """Everything a run produced, self-describing and replayable."""

    master_seed: int
    config: WorldConfig
    rows: list[TraceRow]
    interactions: list[InteractionRecord]
    dream_rows: list[DreamFrameRow]
    percept_rows: list[PerceptRow]


@dataclass(frozen=True)
class Metrics:
    interactions: int
    photos: int
    dream_frames: int
    moves_per_agent: tuple[int, ...]
    total_moves: int
    mean_happiness: float
    mean_curiosity: float
    mean_friendship: float
    mean_courage: float
    mean_fatigue: float

    def items(self) -> list[tuple[str, object]]:
        out: list[tuple[str, object]] = [
            ("interactions", self.interactions),
            ("photos", self.photos),
            ("dream_frames", self.dream_frames),
            ("total_moves", self.total_moves),
        ]
        for aid, m in enumerate(self.moves_per_agent):
            out.append((f"moves_agent_{aid}", m))
        out.extend(
            [
                ("mean_happiness", self.mean_happiness),
                ("mean_curiosity", self.mean_curiosity),
                ("mean_friendship", self.mean_friendship),
                ("mean_courage", self.mean_courage),
                ("mean_fatigue", self.mean_fatigue),
            ]
        )
        return out


class World:
    """Mutable simulation state; see `build_world` and `run`."""

    def __init__(self, config: WorldConfig):
        self.config = config
        self.tick = 0
        ms = config.master_seed
        fd = config.feature_dim
        self.content_graph: SemanticGraph = load_graph(
            config.content_edges, derive_seed(ms, "content-graph"), fd
        )
        self.style_graph: SemanticGraph = load_graph(
            config.style_edges, derive_seed(ms, "style-graph"), fd
        )
        r = config.resolution
        rng = make_rng(derive_seed(ms, "world"))
        spawn_idx = rng.choice(r * r, size=config.n_agents, replace=False)
        self.agents: list[Agent] = []
        for aid in range(config.n_agents):
            field = sample_field(config.agent.kernel, r, make_rng(derive_seed(ms, "field", aid)))
            idx = int(spawn_idx[aid])
            self.agents.append(
                Agent(
                    id=aid,
                    config=config.agent,
                    position=GridCell(idx // r, idx % r),
                    field=field,
                    rng=make_rng(derive_seed(ms, "agent", aid)),
                )
            )
        # Environmental rewards land on every agent's field at the same cells.
        if config.reward_count > 0:
            reward_idx = rng.choice(r * r, size=config.reward_count, replace=False)
            for idx in reward_idx:
                cell = GridCell(int(idx) // r, int(idx) % r)
                for agent in self.agents:
                    agent.field = local_bump(
                        agent.field, cell, config.reward_peak, config.reward_width
                    )
        # One-shot stimuli, at most one per cell, row-major placement order.
        self.stimuli: dict[GridCell, ContentStimulus] = {}
        mods = config.stimulus_modalities
        if mods and config.stimulus_probability > 0:
            for i in range(r):
                for j in range(r):
                    if float(rng.random()) < config.stimulus_probability:
                        modality = mods[int(rng.integers(len(mods)))]
                        feats = rng.random(fd)
                        self.stimuli[GridCell(i, j)] = ContentStimulus(
                            cell=GridCell(i, j),
                            modality=modality,
                            features=feats,
                            score=2.0 * float(np.mean(feats)) - 1.0,
                        )
        self._feature_cache: dict[GridCell, np.ndarray] = {}
        self.rows: list[TraceRow] = []
        self.interactions: list[InteractionRecord] = []
        self.dream_rows: list[DreamFrameRow] = []
        # Tick 0 rows snapshot the initial state before anything happens.
        for agent in self.agents:
            self.rows.append(self._row_for(agent, 0, ()))

    # -- agent environment hooks ------------------------------------------

    def cell_features(self, cell: GridCell) -> np.ndarray:
        """Deterministic per-cell feature vector in [0, 1]^feature_dim."""
        cached = self._feature_cache.get(cell)
        if cached is None:
            rng = make_rng(derive_seed(self.config.master_seed, "cell", cell.i, cell.j))
            cached = rng.random(self.config.feature_dim)
            self._feature_cache[cell] = cached
        return cached

    def take_stimulus(self, cell: GridCell) -> Optional[ContentStimulus]:
        """Consume (and remove) the stimulus at a cell, if any."""
        return self.stimuli.pop(cell, None)

    # -- scheduling --------------------------------------------------------

    def _row_for(self, agent: Agent, tick: int, events: tuple[str, ...]) -> TraceRow:
        e = agent.emotions
        return TraceRow(
            tick=tick,
            agent_id=agent.id,
            i=agent.position.i,
            j=agent.position.j,
            mode=agent.mode,
            e_h=e.happiness,
            e_c=e.curiosity,
            e_f=e.friendship,
            e_k=e.courage,
            fatigue=e.fatigue,
            field_value=agent.field.value_at(agent.position),
            events=events,
        )

    def step(self) -> None:
        """One world tick: agents act in id order, then co-located pairs meet."""
        t = self.tick + 1
        outcomes = {}
        for agent in self.agents:
            outcomes[agent.id] = agent_tick(agent, self, t)
        groups: dict[GridCell, list[Agent]] = {}
        for agent in self.agents:
            if agent.mode == "awake":
                groups.setdefault(agent.position, []).append(agent)
        for cell in sorted(groups):
            members = groups[cell]  # ascending id by construction
            for x in range(len(members)):
                for y in range(x + 1, len(members)):
                    rec = interact(members[x], members[y], t)
                    if rec is None:
                        continue
                    self.interactions.append(rec)
                    outcomes[rec.agent_a].events.append(f"int:{rec.agent_b}:{rec.sent_by_b}")
                    outcomes[rec.agent_b].events.append(f"int:{rec.agent_a}:{rec.sent_by_a}")
        for agent in self.agents:
            out = outcomes[agent.id]
            if out.dream_frame is not None:
                frame = out.dream_frame
                self.dream_rows.append(
                    DreamFrameRow(
                        agent_id=agent.id,
                        tick=t,
                        frame_index=agent.dream_frame_count,
                        percept_id=out.dream_percept_id or "",
                        content_category=frame.content_category,
                        style_category=frame.style_category,
                        origin_i=frame.content_origin.i,
                        origin_j=frame.content_origin.j,
                        pair_distance=frame.pair_distance,
                        valence=out.dream_valence or 0,
                    )
                )
            self.rows.append(self._row_for(agent, t, tuple(out.events)))
        self.tick = t

    def snapshot_trace(self) -> SimulationTrace:
        percept_rows = []
        for agent in self.agents:
            for store in (agent.percepts, agent.styles):
                for p in store:
                    percept_rows.append(
                        PerceptRow(
                            agent_id=agent.id,
                            id=p.id,
                            kind=p.kind,
                            category=p.category,
                            i=p.origin.i,
                            j=p.origin.j,
                            tick=p.tick,
                            features=p.features,
                        )
                    )
        return SimulationTrace(
            master_seed=self.config.master_seed,
            config=self.config,
            rows=list(self.rows),
            interactions=list(self.interactions),
            dream_rows=list(self.dream_rows),
            percept_rows=percept_rows,
        )


def interact(a: Agent, b: Agent, tick: int) -> Optional[InteractionRecord]:
    """Exchange most recent shareable percepts between two co-located agents.

    No-op (no record) when either side has nothing shareable yet. Duplicate
    ids on the receiving side are evaluated but change no state, and the
    encounter is still recorded.
    """
    pa = most_recent_sendable(a)
    pb = most_recent_sendable(b)
    if pa is None or pb is None:
        return None
    eval_b = receive_percept(b, pa)
    eval_a = receive_percept(a, pb)
    return InteractionRecord(
        tick=tick,
        agent_a=a.id,
        agent_b=b.id,
        cell=a.position,
        sent_by_a=pa.id,
        sent_by_b=pb.id,
        eval_by_a=eval_a,
        eval_by_b=eval_b,
    )


def build_world(config: WorldConfig) -> World:
    return World(config)


def run(config: WorldConfig) -> SimulationTrace:
    """Build a world from the config, run every tick, return the full trace."""
    world = build_world(config)
    for _ in range(config.total_ticks):
        world.step()
    return world.snapshot_trace()


def metrics(trace: SimulationTrace) -> Metrics:
    """Summary statistics recomputed from the trace itself.

    Moves are recounted from successive row positions (not from agent
    counters); photo totals come from stored observed percepts; interaction
    and dream totals come from their records.
    """
    photos = sum(1 for p in trace.percept_rows if p.kind == "observed")
    last_pos: dict[int, tuple[int, int]] = {}
    moves: dict[int, int] = {}
    sums = [0.0, 0.0, 0.0, 0.0, 0.0]
    for row in trace.rows:
        moves.setdefault(row.agent_id, 0)
        prev = last_pos.get(row.agent_id)
        if prev is not None and prev != (row.i, row.j):
            moves[row.agent_id] += 1
        last_pos[row.agent_id] = (row.i, row.j)
        sums[0] += row.e_h
        sums[1] += row.e_c
        sums[2] += row.e_f
        sums[3] += row.e_k
        sums[4] += row.fatigue
    n = len(trace.rows)
    means = [s / n if n else 0.0 for s in sums]
    per_agent = tuple(moves[aid] for aid in sorted(moves))
    return Metrics(
        interactions=len(trace.interactions),
        photos=photos,
        dream_frames=len(trace.dream_rows),
        moves_per_agent=per_agent,
        total_moves=sum(per_agent),
        mean_happiness=means[0],
        mean_curiosity=means[1],
        mean_friendship=means[2],
        mean_courage=means[3],
        mean_fatigue=means[4],
    )
