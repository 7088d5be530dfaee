"""Performance metrics, equilibrium bounds, and trial aggregation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .env import SlotState
from .errors import ConfigError
from .games import GameSpec, run_best_response

_NO_JAM = frozenset()


def network_rate(state: SlotState, mode: str = "sum") -> float:
    """Sum of active users' rates, or that sum over the active count."""
    active = state.active_mask
    total = float(state.rates[active].sum())
    if mode == "sum":
        return total
    if mode == "mean-active":
        count = int(active.sum())
        return total / count if count else 0.0
    raise ConfigError(f"network_rate: unknown mode {mode!r}")


def normalized_capacity(state: SlotState, r_max: float) -> float:
    """Network sum rate over the jam-free, interference-free ceiling N*r_max."""
    if r_max <= 0:
        raise ConfigError("normalized_capacity: r_max must be > 0")
    n = state.rates.size
    return float(state.rates[state.active_mask].sum()) / (n * r_max)


@dataclass(frozen=True)
class NeBounds:
    """Best/worst converged network rate over repeated best-response runs."""
    best: float
    worst: float
    num_converged: int
    num_failed: int

    def __iter__(self):
        return iter((self.best, self.worst))


def ne_bounds(game: GameSpec, jammed_channels=_NO_JAM, active_mask=None,
              num_trials: int = 200, rng=None, max_rounds: int = 500) -> NeBounds:
    """Run best-response dynamics from num_trials random starts and report the
    extreme converged network sum rates.

    When the whole profile space fits inside the trial budget, the first
    M^N starts are a shuffled enumeration of every assignment and only the
    remainder is drawn iid. A pure equilibrium is a fixpoint of the dynamics,
    so exhaustive starts make the returned bounds exactly the extreme
    equilibrium rates rather than a sampled estimate of them.

    Non-potential games can cycle; those trials are dropped and counted in
    num_failed. At least one trial must converge.
    """
    if num_trials < 1:
        raise ConfigError("ne_bounds: num_trials must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    n, m = game.num_users, game.num_channels
    active = np.ones(n, dtype=bool) if active_mask is None \
        else np.asarray(active_mask, dtype=bool)
    starts = []
    if m ** n <= num_trials:
        grid = np.array(list(itertools.product(range(m), repeat=n)), dtype=int)
        starts.extend(grid[rng.permutation(len(grid))])
    while len(starts) < num_trials:
        starts.append(rng.integers(0, m, size=n))
    best = -np.inf
    worst = np.inf
    failed = 0
    for start in starts:
        final, converged, _ = run_best_response(game, start, jammed_channels,
                                                active, max_rounds)
        if not converged:
            failed += 1
            continue
        value = float(game.rate_model.rates(final, jammed_channels, active).sum())
        best = max(best, value)
        worst = min(worst, value)
    if failed == num_trials:
        raise RuntimeError("ne_bounds: no best-response trial converged")
    return NeBounds(best=best, worst=worst,
                    num_converged=num_trials - failed, num_failed=failed)


def detect_convergence(series, window: int = 1, threshold: float = 0.99):
    """First index where the series has settled, or None.

    Two flavors share the scan: integer assignment vectors settle when they
    stop changing for `window` consecutive slots; float strategy matrices
    settle when every user's largest probability stays >= threshold over the
    window.
    """
    if window < 1:
        raise ConfigError("detect_convergence: window must be >= 1")
    items = [np.asarray(x) for x in series]
    if len(items) < window:
        return None

    if items[0].dtype.kind == "f":
        def settled(i):
            return all(float(np.min(np.max(np.atleast_2d(items[j]), axis=1))) >= threshold
                       for j in range(i, i + window))
    else:
        def settled(i):
            return all(np.array_equal(items[j], items[i])
                       for j in range(i, i + window))

    for i in range(len(items) - window + 1):
        if settled(i):
            return i
    return None


@dataclass(frozen=True)
class TrialSeries:
    """Per-slot values of one metric for one seeded run."""
    scenario_id: str
    seed: int
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))


@dataclass(frozen=True)
class AggregateCurve:
    """Per-slot mean and normal-approximation 95% half-width over trials."""
    mean: np.ndarray
    ci_half_width: np.ndarray
    trials: int


def mean_ci(values) -> tuple:
    """Mean and 95% half-width (1.96 * sample std / sqrt(n); 0 when n < 2)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ConfigError("mean_ci: need at least one value")
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, 0.0
    half = 1.96 * float(arr.std(ddof=1)) / np.sqrt(arr.size)
    return mean, half


def aggregate_trials(series) -> AggregateCurve:
    """Stack TrialSeries (same length) into a per-slot mean curve."""
    series = list(series)
    if not series:
        raise ConfigError("aggregate_trials: need at least one trial")
    lengths = {s.values.size for s in series}
    if len(lengths) != 1:
        raise ConfigError("aggregate_trials: trials disagree on slot count")
    stacked = np.stack([s.values for s in series])
    mean = stacked.mean(axis=0)
    if stacked.shape[0] < 2:
        half = np.zeros_like(mean)
    else:
        half = 1.96 * stacked.std(axis=0, ddof=1) / np.sqrt(stacked.shape[0])
    return AggregateCurve(mean=mean, ci_half_width=half, trials=stacked.shape[0])
