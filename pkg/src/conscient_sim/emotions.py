"""Bounded emotion dynamics.

Four emotion intensities (happiness, curiosity, friendship, courage) plus
fatigue, each clamped to [0, 1] after every update. Events move emotions by a
step drawn uniformly from [delta_lower, delta_upper]; the passage of time
moves fatigue and curiosity. Each emotion's complement (sadness, boredom,
enmity, fear) is implicit as 1 - value. Updates return new states; inputs are
never mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, ContractError

EVENT_KINDS = ("photo_taken", "dream_frame", "interaction", "content_stimulus")

MODES = ("awake", "asleep")


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(slots=True)
class EmotionState:
    happiness: float = 0.5
    curiosity: float = 0.5
    friendship: float = 0.5
    courage: float = 0.5
    fatigue: float = 0.0

    def __post_init__(self) -> None:
        for name in ("happiness", "curiosity", "friendship", "courage", "fatigue"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ConfigError(f"emotion {name} must be in [0, 1], got {v}")

    def copy(self) -> "EmotionState":
        return replace(self)


@dataclass(frozen=True, slots=True)
class EmotionParams:
    """Declared defaults for every rate; all overridable via config."""

    delta_lower: float = 0.02
    delta_upper: float = 0.08
    fatigue_tick: float = 0.01
    photo_fatigue_delta: float = 0.02
    sleep_decay: float = 0.1
    threshold: float = 0.8
    courage_gain: float = 0.5
    valence_high: float = 0.5
    valence_low: float = -0.5
    high_value_cutoff: float = 0.0
    curiosity_growth: float = 0.002

    def __post_init__(self) -> None:
        if not (0.0 <= self.delta_lower <= self.delta_upper <= 1.0):
            raise ConfigError(
                f"emotion deltas need 0 <= lower <= upper <= 1, "
                f"got ({self.delta_lower}, {self.delta_upper})"
            )
        if self.fatigue_tick < 0:
            raise ConfigError(f"emotion.fatigue_tick must be >= 0, got {self.fatigue_tick}")
        if self.sleep_decay < 0:
            raise ConfigError(f"emotion.sleep_decay must be >= 0, got {self.sleep_decay}")
        if not (0.0 <= self.threshold <= 1.0):
            raise ConfigError(f"emotion.threshold must be in [0, 1], got {self.threshold}")
        if self.courage_gain < 0:
            raise ConfigError(f"emotion.courage_gain must be >= 0, got {self.courage_gain}")
        if self.valence_low > self.valence_high:
            raise ConfigError(
                f"valence thresholds out of order: {self.valence_low} > {self.valence_high}"
            )
        if self.curiosity_growth < 0:
            raise ConfigError(
                f"emotion.curiosity_growth must be >= 0, got {self.curiosity_growth}"
            )
        if not math.isfinite(self.photo_fatigue_delta):
            raise ConfigError("emotion.photo_fatigue_delta must be finite")
        if not (math.isfinite(self.high_value_cutoff)):
            raise ConfigError("emotion.high_value_cutoff must be finite")


@dataclass(frozen=True, slots=True)
class EmotionEvent:
    kind: str
    payload: float

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ContractError(f"unknown emotion event kind {self.kind!r}")
        if not math.isfinite(self.payload):
            raise ContractError(f"event payload must be finite, got {self.payload}")


def _delta(params: EmotionParams, rng: np.random.Generator) -> float:
    return float(rng.uniform(params.delta_lower, params.delta_upper))


def apply_event(
    state: EmotionState,
    event: EmotionEvent,
    params: EmotionParams,
    rng: np.random.Generator,
) -> EmotionState:
    """Move emotions for one event. Every delta below is an independent draw.

    photo_taken: payload is the field value at the photo cell. Above the
      high-value cutoff happiness rises and fatigue takes min(eps, 0); at or
      below, happiness falls and fatigue takes max(eps, 0).
    dream_frame: payload is the frame valence in {-1, 0, +1}; happiness moves
      by valence * delta.
    interaction: payload is the receiver's evaluation of the exchanged
      percept; friendship and happiness move together, up when positive.
    content_stimulus: payload is the stimulus score in [-1, 1]; curiosity
      drops (boredom relieved) and happiness moves with the score's sign.
    """
    new = state.copy()
    eps = params.photo_fatigue_delta
    if event.kind == "photo_taken":
        if event.payload > params.high_value_cutoff:
            new.happiness = _clamp01(new.happiness + _delta(params, rng))
            new.fatigue = _clamp01(new.fatigue + min(eps, 0.0))
        else:
            new.happiness = _clamp01(new.happiness - _delta(params, rng))
            new.fatigue = _clamp01(new.fatigue + max(eps, 0.0))
    elif event.kind == "dream_frame":
        new.happiness = _clamp01(new.happiness + event.payload * _delta(params, rng))
    elif event.kind == "interaction":
        sign = 1.0 if event.payload > 0.0 else -1.0
        new.friendship = _clamp01(new.friendship + sign * _delta(params, rng))
        new.happiness = _clamp01(new.happiness + sign * _delta(params, rng))
    elif event.kind == "content_stimulus":
        new.curiosity = _clamp01(new.curiosity - _delta(params, rng))
        if event.payload > 0.0:
            new.happiness = _clamp01(new.happiness + _delta(params, rng))
        elif event.payload < 0.0:
            new.happiness = _clamp01(new.happiness - _delta(params, rng))
    return new


def tick_emotions(state: EmotionState, params: EmotionParams, mode: str) -> EmotionState:
    """One tick of time. Awake: fatigue grows, faster when unhappy, and
    curiosity drifts up toward boredom. Asleep: fatigue decays.
    """
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    new = state.copy()
    if mode == "awake":
        new.fatigue = _clamp01(
            new.fatigue + params.fatigue_tick * (1.0 + (1.0 - new.happiness))
        )
        new.curiosity = _clamp01(new.curiosity + params.curiosity_growth)
    else:
        new.fatigue = _clamp01(new.fatigue - params.sleep_decay)
    return new


def effective_step_bounds(
    state: EmotionState, base: tuple[int, int], courage_gain: float
) -> tuple[int, int]:
    """Dream step bounds scaled by courage: scale = 1 + gain * (2 courage - 1).

    Full courage lengthens steps, full fear shortens them. Both bounds round
    half-up; the lower bound clamps to >= 0, and whenever the unscaled upper
    bound allows movement at all (>= 1) the scaled upper stays at least 1, so
    fear cannot freeze the walk entirely.
    """
    lo_base, hi_base = base
    if lo_base < 0 or lo_base > hi_base:
        raise ConfigError(f"bad base step bounds {base}")
    if courage_gain < 0:
        raise ConfigError(f"courage_gain must be >= 0, got {courage_gain}")
    scale = 1.0 + courage_gain * (2.0 * state.courage - 1.0)
    lo = max(0, _round_half_up(lo_base * scale))
    hi = _round_half_up(hi_base * scale)
    if hi_base >= 1:
        hi = max(hi, 1)
    hi = max(hi, lo)
    return lo, hi


def should_sleep(
    state: EmotionState,
    ticks_awake: int,
    t_awake_cap: int,
    params: EmotionParams,
    rng: np.random.Generator,
) -> bool:
    """Sleep at the awake-tick cap, else with a fatigue-driven random draw.

    The draw is uniform on [0, fatigue] and compared against the threshold, so
    zero fatigue never sleeps early and the chance grows with fatigue.
    """
    if ticks_awake >= t_awake_cap:
        return True
    return float(rng.uniform(0.0, state.fatigue)) > params.threshold
