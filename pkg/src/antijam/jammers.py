"""Jammer behaviors: fixed, random, sweep, comb, and reactive channel patterns.

Each jammer instance emits one set of jammed channels per slot; several
jammers are just several instances whose sets get unioned by the caller.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError

KINDS = ("fixed", "random", "sweep", "comb", "reactive")


@dataclass(frozen=True)
class JammerPattern:
    kind: str
    fixed_channel: int = 0
    comb_set: tuple = ()
    dwell: int = 1
    start_channel: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"jammer kind: unknown kind {self.kind!r}")
        if self.kind == "comb" and len(self.comb_set) == 0:
            raise ConfigError("comb_set: must be non-empty for comb jammers")
        if self.dwell < 1:
            raise ConfigError("dwell: must be >= 1")
        object.__setattr__(self, "comb_set", tuple(sorted(int(c) for c in self.comb_set)))

    def validate_channels(self, num_channels: int) -> None:
        chans = list(self.comb_set) + [self.fixed_channel, self.start_channel]
        if any(c < 0 or c >= num_channels for c in chans):
            raise ConfigError("jammer pattern: channel index out of [0, num_channels)")


def jammer_action(pattern: JammerPattern, t: int, num_channels: int,
                  last_assignment=None, rng: Optional[np.random.Generator] = None) -> frozenset:
    """Channel set jammed at slot t.

    The reactive kind jams the channel most used in the previous slot's
    assignment (lowest index on ties) and falls back to a random channel when
    it has not observed anything yet.
    """
    if t < 0:
        raise ConfigError("jammer_action: t must be >= 0")
    pattern.validate_channels(num_channels)
    if pattern.kind == "fixed":
        return frozenset({pattern.fixed_channel})
    if pattern.kind == "comb":
        return frozenset(pattern.comb_set)
    if pattern.kind == "sweep":
        return frozenset({(pattern.start_channel + t // pattern.dwell) % num_channels})
    if pattern.kind == "random":
        if rng is None:
            raise ConfigError("jammer_action: random kind needs an rng")
        return frozenset({int(rng.integers(num_channels))})
    # reactive
    if last_assignment is None or len(last_assignment) == 0:
        if rng is None:
            raise ConfigError("jammer_action: reactive kind needs an rng for its fallback")
        return frozenset({int(rng.integers(num_channels))})
    counts = Counter(int(c) for c in last_assignment)
    best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
    return frozenset({best[0]})
