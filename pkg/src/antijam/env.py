"""Time-slotted wireless world: node geometry, link gains, SINR rates, slot advance.

Distances are meters, powers are mW, rates are bits/s/Hz (Shannon capacity over
unit bandwidth). Channels are interchangeable in the physics: a channel index
never enters a gain, so relabeling channels relabels nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class RadioParams:
    """Radio-layer constants shared by every node.

    jam_power may be 0 (a degenerate jammer that radiates nothing); every
    other power must be strictly positive.
    """

    num_channels: int
    tx_power: float = 1.0
    jam_power: float = 1.0
    noise_floor: float = 1e-2
    pathloss_exponent: float = 2.0
    min_distance: float = 1.0

    def __post_init__(self) -> None:
        if self.num_channels < 1:
            raise ConfigError("num_channels: must be >= 1")
        if self.tx_power <= 0:
            raise ConfigError("tx_power: must be > 0")
        if self.jam_power < 0:
            raise ConfigError("jam_power: must be >= 0")
        if self.noise_floor <= 0:
            raise ConfigError("noise_floor: must be > 0")
        if self.pathloss_exponent < 0:
            raise ConfigError("pathloss_exponent: must be >= 0")
        if self.min_distance <= 0:
            raise ConfigError("min_distance: must be > 0")


class NodeGeometry:
    """Transmitter/receiver positions for each user pair, plus jammer positions."""

    def __init__(self, user_pairs: Sequence, jammer_positions: Sequence = ()) -> None:
        pairs = np.asarray(user_pairs, dtype=float)
        if pairs.ndim != 3 or pairs.shape[1:] != (2, 2):
            raise ConfigError("user_pairs: expected shape (N, 2, 2) of (tx, rx) points")
        if pairs.shape[0] == 0:
            raise ConfigError("user_pairs: must be non-empty")
        jammers = np.asarray(jammer_positions, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(pairs)) or not np.all(np.isfinite(jammers)):
            raise ConfigError("geometry: all coordinates must be finite")
        self.tx = pairs[:, 0, :].copy()
        self.rx = pairs[:, 1, :].copy()
        self.jammers = jammers.copy()

    @property
    def num_users(self) -> int:
        return self.tx.shape[0]

    @property
    def num_jammers(self) -> int:
        return self.jammers.shape[0]

    def user_pairs(self) -> list:
        """Round-trippable [(tx, rx), ...] coordinate list."""
        return [
            [[float(x) for x in self.tx[n]], [float(x) for x in self.rx[n]]]
            for n in range(self.num_users)
        ]

    def jammer_list(self) -> list:
        return [[float(x) for x in pos] for pos in self.jammers]


def link_gain(from_position, to_position, params: RadioParams) -> float:
    """Path-loss gain max(d, min_distance)^(-alpha) between two points."""
    d = math.dist(tuple(from_position), tuple(to_position))
    return max(d, params.min_distance) ** (-params.pathloss_exponent)


@dataclass(eq=False)
class SlotState:
    """World state for one slot: joint channel choice, jamming, activity, rates."""

    slot_index: int
    choices: np.ndarray
    jammed_channels: frozenset
    active_mask: np.ndarray
    rates: np.ndarray

    def __post_init__(self) -> None:
        self.choices = np.asarray(self.choices, dtype=np.int64)
        self.active_mask = np.asarray(self.active_mask, dtype=bool)
        self.rates = np.asarray(self.rates, dtype=float)
        self.jammed_channels = frozenset(int(c) for c in self.jammed_channels)
        n = self.choices.shape[0]
        if self.active_mask.shape[0] != n or self.rates.shape[0] != n:
            raise ConfigError("SlotState: choices/active_mask/rates lengths differ")


class RateModel:
    """Precomputed link budget for one geometry; evaluates per-user Shannon rates.

    gain[m, n] is the path gain from user m's transmitter to user n's receiver;
    jam_gain[k, n] from jammer k to user n's receiver. Precomputing these keeps
    the per-slot rate evaluation to a handful of small vector ops.
    """

    def __init__(self, geometry: NodeGeometry, params: RadioParams) -> None:
        self.geometry = geometry
        self.params = params
        n = geometry.num_users
        self.gain = np.empty((n, n))
        for m in range(n):
            for j in range(n):
                self.gain[m, j] = link_gain(geometry.tx[m], geometry.rx[j], params)
        self.own_gain = np.diag(self.gain).copy()
        self.jam_gain = np.empty((geometry.num_jammers, n))
        for k in range(geometry.num_jammers):
            for j in range(n):
                self.jam_gain[k, j] = link_gain(geometry.jammers[k], geometry.rx[j], params)
        # Total jam power arriving at each receiver when its channel is jammed.
        self.jam_at_rx = params.jam_power * self.jam_gain.sum(axis=0)

    @property
    def num_users(self) -> int:
        return self.geometry.num_users

    def rates(self, choices, jammed_channels, active_mask) -> np.ndarray:
        """Per-user achievable rates for one slot.

        Inactive users radiate nothing and receive a rate of 0. A user hears
        jamming power iff its own channel is in the jammed set.
        """
        p = self.params
        choices = np.asarray(choices, dtype=np.int64)
        active = np.asarray(active_mask, dtype=bool)
        n = self.num_users
        if choices.shape[0] != n or active.shape[0] != n:
            raise ConfigError("rates: choices/active_mask length must equal num_users")
        if choices.size and (choices.min() < 0 or choices.max() >= p.num_channels):
            raise ConfigError("rates: channel index out of range")

        co = (choices[:, None] == choices[None, :]) & active[:, None] & active[None, :]
        np.fill_diagonal(co, False)
        # interference[j] = sum over co-channel active transmitters m of p_tx * gain[m, j]
        interference = p.tx_power * np.einsum("mj,mj->j", co, self.gain)
        if jammed_channels:
            jammed = np.isin(choices, np.fromiter(jammed_channels, dtype=np.int64))
        else:
            jammed = np.zeros(n, dtype=bool)
        denom = p.noise_floor + interference + np.where(jammed, self.jam_at_rx, 0.0)
        sinr = p.tx_power * self.own_gain / denom
        return np.where(active, np.log2(1.0 + sinr), 0.0)


def compute_rates(choices, jammed_channels, active_mask,
                  geometry: NodeGeometry, params: RadioParams) -> np.ndarray:
    """One-shot rate evaluation; build a RateModel for repeated calls."""
    return RateModel(geometry, params).rates(choices, jammed_channels, active_mask)


def max_single_user_rate(model: RateModel) -> float:
    """Interference-free rate of the best own link; the r_max normalizer."""
    p = model.params
    return float(np.log2(1.0 + p.tx_power * model.own_gain.max() / p.noise_floor))


def advance_slot(current: SlotState, jammer_actions: Iterable, user_actions,
                 activity_draws, model: RateModel, active_prob: float = 1.0) -> SlotState:
    """Advance the world one slot.

    jammer_actions is one channel set per jammer (their union is stored);
    activity_draws are uniform[0,1) draws turned into Bernoulli(active_prob)
    activity. Deterministic given its inputs.
    """
    n = model.num_users
    choices = np.asarray(user_actions, dtype=np.int64)
    draws = np.asarray(activity_draws, dtype=float)
    if choices.shape[0] != n:
        raise ConfigError("advance_slot: user_actions length must equal num_users")
    if draws.shape[0] != n:
        raise ConfigError("advance_slot: activity_draws length must equal num_users")
    jam_sets = [frozenset(int(c) for c in s) for s in jammer_actions]
    if len(jam_sets) != model.geometry.num_jammers:
        raise ConfigError("advance_slot: one action set per jammer required")
    jammed = frozenset().union(*jam_sets) if jam_sets else frozenset()
    if jammed and (min(jammed) < 0 or max(jammed) >= model.params.num_channels):
        raise ConfigError("advance_slot: jammer channel out of range")
    active = draws < active_prob
    rates = model.rates(choices, jammed, active)
    return SlotState(
        slot_index=current.slot_index + 1,
        choices=choices,
        jammed_channels=jammed,
        active_mask=active,
        rates=rates,
    )


def initial_slot(num_users: int) -> SlotState:
    """Slot 0 placeholder before anyone has acted."""
    return SlotState(
        slot_index=0,
        choices=np.zeros(num_users, dtype=np.int64),
        jammed_channels=frozenset(),
        active_mask=np.zeros(num_users, dtype=bool),
        rates=np.zeros(num_users),
    )
