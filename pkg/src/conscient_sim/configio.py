"""Flat `section.key = value` config files.

Every tunable in the simulator has a dotted key; a config file lists any
subset of them (blank lines and # comments ignored) and everything else takes
its declared default. Unknown keys, duplicate keys, and type mismatches are
rejected with the offending key and line number. Parsed values are echoed back
in a canonical rendering so a manifest can reproduce the run exactly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional

from .agents import AgentConfig
from .dreams import DreamConfig
from .emotions import EmotionParams
from .errors import ConfigError
from .fields import KernelConfig
from .optimizer import GAConfig
from .semantics import BUILTIN_CONTENT_EDGES, BUILTIN_STYLE_EDGES
from .world import WorldConfig

BUILTIN_GRAPH = "builtin"


def _cast_int(raw: str) -> int:
    return int(raw, 10)


def _cast_float(raw: str) -> float:
    v = float(raw)
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError("not finite")
    return v


def _cast_bool(raw: str) -> bool:
    low = raw.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise ValueError("expected true or false")


def _cast_str(raw: str) -> str:
    return raw


def _cast_int_list(raw: str) -> tuple[int, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected comma-separated integers")
    return tuple(int(p, 10) for p in parts)


def _cast_str_list(raw: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in raw.split(",") if p.strip())


def _render_plain(v) -> str:
    return str(v)


def _render_float(v) -> str:
    return repr(float(v))


def _render_bool(v) -> str:
    return "true" if v else "false"


def _render_list(v) -> str:
    return ",".join(str(x) for x in v)


@dataclass(frozen=True)
class _Entry:
    key: str
    cast: Callable[[str], object]
    render: Callable[[object], str]
    default: object
    typename: str


def _entries() -> list[_Entry]:
    w = WorldConfig()
    a = AgentConfig()
    d = DreamConfig()
    e = EmotionParams()
    k = KernelConfig()
    g = GAConfig()

    def i(key, default):
        return _Entry(key, _cast_int, _render_plain, default, "integer")

    def f(key, default):
        return _Entry(key, _cast_float, _render_float, default, "number")

    def b(key, default):
        return _Entry(key, _cast_bool, _render_bool, default, "boolean")

    def s(key, default):
        return _Entry(key, _cast_str, _render_plain, default, "string")

    def il(key, default):
        return _Entry(key, _cast_int_list, _render_list, default, "integer list")

    def sl(key, default):
        return _Entry(key, _cast_str_list, _render_list, default, "string list")

    return [
        i("world.resolution", w.resolution),
        i("world.n_agents", w.n_agents),
        i("world.total_ticks", w.total_ticks),
        i("world.reward_count", w.reward_count),
        f("world.reward_peak", w.reward_peak),
        f("world.reward_width", w.reward_width),
        f("world.stimulus_probability", w.stimulus_probability),
        sl("world.stimulus_modalities", w.stimulus_modalities),
        i("world.feature_dim", w.feature_dim),
        i("world.master_seed", w.master_seed),
        s("world.content_graph", BUILTIN_GRAPH),
        s("world.style_graph", BUILTIN_GRAPH),
        i("agent.t_awake", a.t_awake),
        i("agent.t_asleep", a.t_asleep),
        i("agent.photo_period", a.photo_period),
        f("agent.explore_rate", a.explore_rate),
        i("agent.movement_budget", a.movement_budget),
        f("agent.visit_peak", a.visit_peak),
        f("agent.visit_width", a.visit_width),
        f("agent.visit_reward", a.visit_reward),
        f("agent.noise_sigma", a.noise_sigma),
        i("agent.style_every", a.style_every),
        f("agent.low_happiness_cutoff", a.low_happiness_cutoff),
        i("dream.step_lower", d.step_lower),
        i("dream.step_upper", d.step_upper),
        i("dream.length", d.length),
        f("dream.style_weight", d.style_weight),
        f("emotion.delta_lower", e.delta_lower),
        f("emotion.delta_upper", e.delta_upper),
        f("emotion.fatigue_tick", e.fatigue_tick),
        f("emotion.photo_fatigue_delta", e.photo_fatigue_delta),
        f("emotion.sleep_decay", e.sleep_decay),
        f("emotion.threshold", e.threshold),
        f("emotion.courage_gain", e.courage_gain),
        f("emotion.valence_high", e.valence_high),
        f("emotion.valence_low", e.valence_low),
        f("emotion.high_value_cutoff", e.high_value_cutoff),
        f("emotion.curiosity_growth", e.curiosity_growth),
        f("kernel.amplitude", k.amplitude),
        f("kernel.lengthscale", k.lengthscale),
        f("kernel.jitter", k.jitter),
        i("ga.population_size", g.population_size),
        i("ga.generations", g.generations),
        i("ga.tournament_size", g.tournament_size),
        f("ga.crossover_rate", g.crossover_rate),
        f("ga.mutation_rate", g.mutation_rate),
        f("ga.mutation_sigma", g.mutation_sigma),
        i("ga.elite_count", g.elite_count),
        il("ga.eval_seeds", g.eval_seeds),
        i("ga.movement_budget", g.movement_budget),
        b("ga.normalize_fitness", g.normalize_fitness),
    ]


ENTRIES: list[_Entry] = _entries()
_BY_KEY: dict[str, _Entry] = {entry.key: entry for entry in ENTRIES}


@dataclass(eq=False)
class ConfigBundle:
    world: WorldConfig
    ga: GAConfig
    # canonical `key -> rendered value` for every parameter, defaults included
    effective: dict[str, str]


def default_values() -> dict[str, str]:
    return {entry.key: entry.render(entry.default) for entry in ENTRIES}


def render_config(values: dict[str, str]) -> str:
    """Config file text reproducing the given effective values."""
    lines = [f"{entry.key} = {values[entry.key]}" for entry in ENTRIES if entry.key in values]
    return "\n".join(lines) + "\n"


def _load_edges(label: str, base_dir: str, key: str) -> tuple[str, str]:
    """Resolve a graph label to (edge text, canonical label)."""
    if label == BUILTIN_GRAPH:
        text = BUILTIN_CONTENT_EDGES if key == "world.content_graph" else BUILTIN_STYLE_EDGES
        return text, BUILTIN_GRAPH
    path = label if os.path.isabs(label) else os.path.join(base_dir, label)
    path = os.path.abspath(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read(), path
    except OSError as exc:
        raise ConfigError(f"key {key}: cannot read graph file {path}: {exc}") from None


def parse_config_text(
    text: str, base_dir: str = ".", overrides: Optional[dict[str, str]] = None
) -> ConfigBundle:
    """Parse flat config text; see module docstring for the format."""
    values = default_values()
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _BY_KEY:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        entry = _BY_KEY[key]
        try:
            parsed = entry.cast(val)
        except ValueError:
            raise ConfigError(
                f"line {lineno}: key {key}: expected {entry.typename}, got {val!r}"
            ) from None
        values[key] = entry.render(parsed)
    if overrides:
        for key, val in overrides.items():
            if key not in _BY_KEY:
                raise ConfigError(f"override: unknown key {key!r}")
            values[key] = _BY_KEY[key].render(_BY_KEY[key].cast(val))
    return _build(values, base_dir)


def parse_config(path: str, overrides: Optional[dict[str, str]] = None) -> ConfigBundle:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_config_text(text, base_dir=os.path.dirname(os.path.abspath(path)), overrides=overrides)


def _build(values: dict[str, str], base_dir: str) -> ConfigBundle:
    def get(key: str):
        return _BY_KEY[key].cast(values[key])

    kernel = KernelConfig(
        amplitude=get("kernel.amplitude"),
        lengthscale=get("kernel.lengthscale"),
        jitter=get("kernel.jitter"),
    )
    emotion = EmotionParams(
        delta_lower=get("emotion.delta_lower"),
        delta_upper=get("emotion.delta_upper"),
        fatigue_tick=get("emotion.fatigue_tick"),
        photo_fatigue_delta=get("emotion.photo_fatigue_delta"),
        sleep_decay=get("emotion.sleep_decay"),
        threshold=get("emotion.threshold"),
        courage_gain=get("emotion.courage_gain"),
        valence_high=get("emotion.valence_high"),
        valence_low=get("emotion.valence_low"),
        high_value_cutoff=get("emotion.high_value_cutoff"),
        curiosity_growth=get("emotion.curiosity_growth"),
    )
    dreamc = DreamConfig(
        step_lower=get("dream.step_lower"),
        step_upper=get("dream.step_upper"),
        length=get("dream.length"),
        style_weight=get("dream.style_weight"),
    )
    agent = AgentConfig(
        t_awake=get("agent.t_awake"),
        t_asleep=get("agent.t_asleep"),
        photo_period=get("agent.photo_period"),
        explore_rate=get("agent.explore_rate"),
        movement_budget=get("agent.movement_budget"),
        visit_peak=get("agent.visit_peak"),
        visit_width=get("agent.visit_width"),
        visit_reward=get("agent.visit_reward"),
        noise_sigma=get("agent.noise_sigma"),
        style_every=get("agent.style_every"),
        low_happiness_cutoff=get("agent.low_happiness_cutoff"),
        dream=dreamc,
        emotion=emotion,
        kernel=kernel,
    )
    content_edges, content_label = _load_edges(
        str(get("world.content_graph")), base_dir, "world.content_graph"
    )
    style_edges, style_label = _load_edges(
        str(get("world.style_graph")), base_dir, "world.style_graph"
    )
    values = dict(values)
    values["world.content_graph"] = content_label
    values["world.style_graph"] = style_label
    world = WorldConfig(
        resolution=get("world.resolution"),
        n_agents=get("world.n_agents"),
        total_ticks=get("world.total_ticks"),
        reward_count=get("world.reward_count"),
        reward_peak=get("world.reward_peak"),
        reward_width=get("world.reward_width"),
        stimulus_probability=get("world.stimulus_probability"),
        stimulus_modalities=get("world.stimulus_modalities"),
        feature_dim=get("world.feature_dim"),
        master_seed=get("world.master_seed"),
        agent=agent,
        content_edges=content_edges,
        style_edges=style_edges,
    )
    ga = GAConfig(
        population_size=get("ga.population_size"),
        generations=get("ga.generations"),
        tournament_size=get("ga.tournament_size"),
        crossover_rate=get("ga.crossover_rate"),
        mutation_rate=get("ga.mutation_rate"),
        mutation_sigma=get("ga.mutation_sigma"),
        elite_count=get("ga.elite_count"),
        eval_seeds=get("ga.eval_seeds"),
        movement_budget=get("ga.movement_budget"),
        normalize_fitness=get("ga.normalize_fitness"),
    )
    return ConfigBundle(world=world, ga=ga, effective=values)
