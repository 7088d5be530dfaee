"""Rate environment tests: path loss, SINR rates, slot bookkeeping.

The two frozen rate vectors below were worked out by hand with the plain
Shannon formula before the model existed, so they cross-check the whole
gain/interference/jamming pipeline and not just internal consistency.
"""

import numpy as np
import pytest

from antijam import (
    ConfigError,
    NodeGeometry,
    RadioParams,
    RateModel,
    SlotState,
    advance_slot,
    compute_rates,
    initial_slot,
    link_gain,
    max_single_user_rate,
)


def two_user_setup():
    geo = NodeGeometry(
        user_pairs=[[[0.0, 0.0], [1.0, 0.0]], [[3.0, 0.0], [3.0, 1.0]]],
        jammer_positions=[[1.0, 1.0]],
    )
    params = RadioParams(num_channels=2, tx_power=2.0, jam_power=4.0,
                         noise_floor=0.05, pathloss_exponent=2.0)
    return geo, params


def test_link_gain_inverse_square():
    params = RadioParams(num_channels=1, pathloss_exponent=2.0)
    assert link_gain([0.0, 0.0], [2.0, 0.0], params) == pytest.approx(0.25)
    assert link_gain([0.0, 0.0], [10.0, 0.0], params) == pytest.approx(0.01)


def test_link_gain_clamps_below_min_distance():
    # Anything closer than min_distance is treated as sitting at min_distance,
    # including the degenerate zero-distance case.
    params = RadioParams(num_channels=1, pathloss_exponent=3.0, min_distance=1.0)
    assert link_gain([0.0, 0.0], [0.3, 0.0], params) == 1.0
    assert link_gain([5.0, 5.0], [5.0, 5.0], params) == 1.0


def test_rates_match_hand_computed_values():
    geo, params = two_user_setup()
    model = RateModel(geo, params)
    both = model.rates(np.array([0, 0]), frozenset({0}), np.array([True, True]))
    # user 0: signal 2, interference 0.5, jam 4, noise 0.05
    # user 1: signal 2, interference 0.2, jam 1, noise 0.05
    assert both[0] == pytest.approx(0.525628361338754, abs=1e-12)
    assert both[1] == pytest.approx(1.3785116232537298, abs=1e-12)

    split = model.rates(np.array([0, 1]), frozenset({0}), np.array([True, True]))
    assert split[0] == pytest.approx(0.5790132343899698, abs=1e-12)
    assert split[1] == pytest.approx(5.357552004618084, abs=1e-12)


def test_compute_rates_agrees_with_model():
    geo, params = two_user_setup()
    model = RateModel(geo, params)
    rng = np.random.default_rng(7)
    for _ in range(50):
        choices = rng.integers(0, 2, size=2)
        active = rng.random(2) < 0.7
        jammed = frozenset(int(c) for c in rng.integers(0, 2, size=rng.integers(0, 3)))
        a = compute_rates(choices, jammed, active, geo, params)
        b = model.rates(choices, jammed, active)
        assert np.allclose(a, b)


def test_channel_relabeling_leaves_rates_unchanged():
    """Channels are physically identical, so any permutation of the labels
    applied to both the assignment and the jammed set is a no-op."""
    rng = np.random.default_rng(123)
    for _ in range(60):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(2, 5))
        pairs = rng.uniform(-5, 5, size=(n, 2, 2))
        jams = rng.uniform(-5, 5, size=(int(rng.integers(0, 3)), 2))
        geo = NodeGeometry(user_pairs=pairs, jammer_positions=jams)
        params = RadioParams(num_channels=m, tx_power=1.5, jam_power=2.0,
                             noise_floor=0.02, pathloss_exponent=2.5)
        model = RateModel(geo, params)
        choices = rng.integers(0, m, size=n)
        active = rng.random(n) < 0.8
        jammed = frozenset(int(c) for c in rng.integers(0, m, size=2))
        perm = rng.permutation(m)
        base = model.rates(choices, jammed, active)
        relabeled = model.rates(perm[choices],
                                frozenset(int(perm[c]) for c in jammed), active)
        assert np.allclose(base, relabeled), "relabeling changed the physics"


def test_inactive_users_have_zero_rate_and_no_footprint():
    geo, params = two_user_setup()
    model = RateModel(geo, params)
    silent = model.rates(np.array([0, 0]), frozenset(), np.array([True, False]))
    assert silent[1] == 0.0
    alone = model.rates(np.array([0, 1]), frozenset(), np.array([True, True]))
    # with user 1 off-channel or inactive, user 0 sees the same clean rate
    assert silent[0] == pytest.approx(alone[0])


def test_extra_cochannel_interferer_never_helps():
    rng = np.random.default_rng(99)
    for _ in range(40):
        n = int(rng.integers(3, 6))
        pairs = rng.uniform(-4, 4, size=(n, 2, 2))
        geo = NodeGeometry(user_pairs=pairs)
        params = RadioParams(num_channels=3, noise_floor=0.05)
        model = RateModel(geo, params)
        choices = rng.integers(0, 3, size=n)
        active = np.ones(n, dtype=bool)
        off = active.copy()
        victim = int(rng.integers(n))
        off[victim] = False
        with_all = model.rates(choices, frozenset(), active)
        without = model.rates(choices, frozenset(), off)
        keep = np.arange(n) != victim
        assert np.all(with_all[keep] <= without[keep] + 1e-12)


def test_jam_on_other_channel_is_harmless():
    geo, params = two_user_setup()
    model = RateModel(geo, params)
    clean = model.rates(np.array([1, 1]), frozenset(), np.array([True, True]))
    jammed_elsewhere = model.rates(np.array([1, 1]), frozenset({0}),
                                   np.array([True, True]))
    assert np.allclose(clean, jammed_elsewhere)


def test_max_single_user_rate_upper_bounds_everything():
    rng = np.random.default_rng(2024)
    for _ in range(30):
        n = int(rng.integers(1, 6))
        pairs = rng.uniform(-6, 6, size=(n, 2, 2))
        # co-locate each rx with its tx so the best link gain is realized
        pairs[:, 1, :] = pairs[:, 0, :]
        geo = NodeGeometry(user_pairs=pairs,
                           jammer_positions=rng.uniform(-6, 6, size=(1, 2)))
        params = RadioParams(num_channels=4, jam_power=3.0)
        model = RateModel(geo, params)
        r_max = max_single_user_rate(model)
        choices = rng.integers(0, 4, size=n)
        active = rng.random(n) < 0.9
        jammed = frozenset({int(rng.integers(4))})
        rates = model.rates(choices, jammed, active)
        assert np.all(rates <= r_max + 1e-12)


def test_initial_slot_is_empty():
    s = initial_slot(3)
    assert s.slot_index == 0
    assert not s.active_mask.any()
    assert np.all(s.rates == 0.0)


def test_advance_slot_rolls_state_forward():
    geo, params = two_user_setup()
    model = RateModel(geo, params)
    s0 = initial_slot(2)
    s1 = advance_slot(s0, [frozenset({1})], np.array([0, 1]),
                      np.array([0.0, 0.0]), model, active_prob=1.0)
    assert s1.slot_index == 1
    assert s1.jammed_channels == frozenset({1})
    assert s1.active_mask.all()
    assert s1.rates.shape == (2,)
    # activity draws above the threshold silence the user
    s2 = advance_slot(s1, [frozenset()], np.array([0, 1]),
                      np.array([0.5, 0.99]), model, active_prob=0.6)
    assert bool(s2.active_mask[0]) is True
    assert bool(s2.active_mask[1]) is False
    assert s2.rates[1] == 0.0


def test_multiple_jammers_union():
    geo = NodeGeometry(
        user_pairs=[[[0.0, 0.0], [1.0, 0.0]], [[3.0, 0.0], [3.0, 1.0]]],
        jammer_positions=[[1.0, 1.0], [-2.0, 0.5]],
    )
    params = RadioParams(num_channels=3)
    model = RateModel(geo, params)
    s0 = initial_slot(2)
    s1 = advance_slot(s0, [frozenset({0}), frozenset({1})], np.array([0, 1]),
                      np.zeros(2), model)
    assert s1.jammed_channels == frozenset({0, 1})
    # an action set per jammer is mandatory
    with pytest.raises(ConfigError):
        advance_slot(s1, [frozenset({0})], np.array([0, 1]), np.zeros(2), model)


def test_radio_params_validation():
    with pytest.raises(ConfigError):
        RadioParams(num_channels=0)
    with pytest.raises(ConfigError):
        RadioParams(num_channels=2, tx_power=0.0)
    with pytest.raises(ConfigError):
        RadioParams(num_channels=2, noise_floor=-1.0)
    # zero jam power is legal: a jammer that radiates nothing
    RadioParams(num_channels=2, jam_power=0.0)


def test_slot_state_shape_mismatch_rejected():
    with pytest.raises(ConfigError):
        SlotState(slot_index=0, choices=np.array([0, 1]),
                  jammed_channels=frozenset(), active_mask=np.array([True]),
                  rates=np.zeros(2))
