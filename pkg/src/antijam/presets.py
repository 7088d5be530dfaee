"""Bundled scenario documents.

Each preset is a complete config document: pass it through load_config, or
name it on the CLI with --preset. Population sizes, geometry, and slot counts
are desk-scale choices tuned so the qualitative orderings are visible in a few
minutes of CPU time.
"""

from __future__ import annotations

import copy

from .errors import ConfigError

# One adaptive jammer against three clustered users on three channels. The
# jammer sits below the user triangle, so the far user tolerates jamming best
# and the equilibria with different occupants of the jammed channel have
# different network rates.
_FIG3 = {
    "scenario": "stackelberg",
    "name": "fig3-stackelberg",
    "num_users": 3,
    "num_channels": 3,
    "slots": 3000,
    "trials": 50,
    "seed": 11,
    "active_probability": 1.0,
    "radio": {"jam_power": 1.0},
    "geometry": {
        "layout": "explicit",
        "user_pairs": [
            [[0.0, 0.0], [0.0, 0.0]],
            [[1.45, 0.0], [1.45, 0.0]],
            [[0.725, 1.2557], [0.725, 1.2557]],
        ],
        "jammer_positions": [[0.725, -1.5266]],
    },
    "algorithms": ["hierarchical", "random"],
    "learning": {"window_slots": 50, "leader_epsilon_decay": 0.93},
}

# Two users dodging a deterministic jammer on four channels. The sweep hop is
# predictable from the previous slot's sensing result, the comb is static.
_FIG4_BASE = {
    "scenario": "markov",
    "num_users": 2,
    "num_channels": 4,
    "slots": 2000,
    "trials": 20,
    "seed": 5,
    "active_probability": 1.0,
    "geometry": {
        "layout": "explicit",
        "user_pairs": [
            [[0.0, 0.0], [0.0, 0.0]],
            [[1.0, 0.0], [1.0, 0.0]],
        ],
        "jammer_positions": [[0.5, 1.2]],
    },
    "algorithms": ["collaborative", "independent_q", "sensing", "random"],
    # The jammer's next channel never depends on what the users do, so the
    # bootstrap term of the Q update carries no policy information here. With
    # a nonzero discount it actively hurts: a channel that keeps getting
    # picked has its value pumped toward r/(1-discount), which can freeze a
    # learner onto the jammed channel before exploration has priced the clean
    # ones. Myopic updates make the value of each (state, channel) pair a
    # plain running average of its reward. The exploration floor is kept well
    # above the global default so residual exploration keeps probing: under
    # it the claiming protocol still shields an explorer from the other user
    # (collisions need both to explore at once), while uncoordinated learners
    # collide whenever either one explores onto the other's channel.
    "learning": {"discount": 0.0, "epsilon_floor": 0.06},
}

# Eight users, one powerful fixed jammer halfway between two groups. Users
# 0-2 form a loose triangle with one genuinely close pair (the strong edge);
# users 3-7 sit on a pentagon whose five consecutive triples are the weak
# hyperedges. Pairwise spacing inside the groups is wide enough that sharing
# a channel with one neighbour costs little, but three ring neighbours on
# the same channel drag each other down, which is exactly the aggregate
# effect the threshold term prices in. A learner that only sees the strong
# edge and the jam is indifferent between the two clean channels, so it
# strands whole triples on one of them roughly a quarter of the time each.
_FIG5 = {
    "scenario": "hypergraph",
    "name": "fig5-hypergraph",
    "num_users": 8,
    "num_channels": 3,
    "slots": 2500,
    "trials": 20,
    "seed": 3,
    "active_probability": 1.0,
    "radio": {"jam_power": 120.0},
    "geometry": {
        "layout": "explicit",
        "user_pairs": [
            [[0.0, 0.0], [0.0, 0.0]],
            [[3.0, 0.0], [3.0, 0.0]],
            [[2.55, 1.2], [2.55, 1.2]],
            [[26.0, 5.21], [26.0, 5.21]],
            [[28.1, 3.68], [28.1, 3.68]],
            [[27.3, 1.21], [27.3, 1.21]],
            [[24.7, 1.21], [24.7, 1.21]],
            [[23.9, 3.68], [23.9, 3.68]],
        ],
        "jammer_positions": [[14.0, 1.7]],
    },
    "jammer": {"kind": "fixed", "fixed_channel": 0},
    "hypergraph": {
        "source": "explicit",
        "strong_edges": [[1, 2]],
        "weak_hyperedges": [
            [0, 1, 2],
            [3, 4, 5],
            [4, 5, 6],
            [5, 6, 7],
            [6, 7, 3],
            [7, 3, 4],
        ],
        "activation_threshold": 3,
    },
    "algorithms": ["hypergraph_sla", "graph_sla", "random"],
}


def _fig4(name: str, jammer: dict) -> dict:
    doc = copy.deepcopy(_FIG4_BASE)
    doc["name"] = name
    doc["jammer"] = jammer
    return doc


_PRESETS = {
    "fig3-stackelberg": (
        "adaptive jammer vs 3 users, hierarchical learning between the NE bounds",
        _FIG3,
    ),
    "fig4-sweep": (
        "2 users vs a sweep jammer, coordinated Q-learning against baselines",
        _fig4("fig4-sweep", {"kind": "sweep", "dwell": 1, "start_channel": 0}),
    ),
    "fig4-comb": (
        "2 users vs a comb jammer on channels 0 and 2",
        _fig4("fig4-comb", {"kind": "comb", "comb_set": [0, 2]}),
    ),
    "fig5-hypergraph": (
        "8 clustered users, hypergraph vs graph interference learning",
        _FIG5,
    ),
}


def preset_names() -> tuple:
    return tuple(sorted(_PRESETS))


def preset_description(name: str) -> str:
    if name not in _PRESETS:
        raise ConfigError(f"preset: unknown preset {name!r}")
    return _PRESETS[name][0]


def get_preset(name: str) -> dict:
    """A deep copy of the named preset's config document."""
    if name not in _PRESETS:
        raise ConfigError(
            f"preset: unknown preset {name!r} (available: {', '.join(preset_names())})")
    return copy.deepcopy(_PRESETS[name][1])
