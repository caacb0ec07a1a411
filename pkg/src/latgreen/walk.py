"""Monte Carlo oracle: geometrically killed nearest-neighbour random walk.

A walk started at the origin survives each step with probability
``1/(1+a^2)`` (equivalently, its length is geometric), and its expected
number of visits to ``x`` equals ``(1+a^2)`` times the lattice Green
function.  Visits are tallied inside a cubic window; walks that leave the
window keep running because they may return, only the tallying is windowed.

Walks advance in vectorized batches with per-step Bernoulli killing.  Each
batch draws from its own Philox (counter-based) stream keyed by
``(seed, batch_index)``, so the merged tallies are independent of batch
execution order and bit-reproducible for a fixed config.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

__all__ = [
    "WalkConfig",
    "VisitEstimate",
    "run_killed_walks",
    "estimate_green",
    "kill_time_survival",
]

_BATCH = 20_000


@dataclass(frozen=True)
class WalkConfig:
    """Walk ensemble parameters.

    The per-step death probability is ``a^2/(1+a^2)``; ``max_box`` is the
    tally window half-width in the sup norm.
    """

    d: int
    a: float
    n_walks: int
    seed: int
    max_box: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DomainError("d must be an integer >= 1")
        if not np.isfinite(self.a) or self.a <= 0.0:
            raise DomainError("a must be > 0 (the walk never dies at a = 0)")
        if self.n_walks < 1:
            raise ConfigError("n_walks must be >= 1")
        if self.n_walks > 10 ** 12:
            raise ConfigError("n_walks too large for exact int64 tallies")
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigError("seed must fit in 64 bits")
        if self.max_box < 0:
            raise ConfigError("max_box must be >= 0")

    @property
    def death_probability(self):
        return self.a * self.a / (1.0 + self.a * self.a)


@dataclass(frozen=True)
class VisitEstimate:
    """Sample mean and standard error of per-walk visit counts at a point."""

    x: tuple
    mean: float
    std_err: float
    n_walks: int


def _batch_rng(cfg, batch_index):
    key = np.array([cfg.seed, batch_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_batch(cfg, batch_index, n_walks):
    """Tally one batch; returns (sum, sum of squares) per window point."""
    d, b = cfg.d, cfg.max_box
    side = 2 * b + 1
    n_points = side ** d
    strides = side ** np.arange(d - 1, -1, -1, dtype=np.int64)
    rng = _batch_rng(cfg, batch_index)
    p_die = cfg.death_probability

    visits = np.zeros((n_walks, n_points), dtype=np.int32)
    origin_flat = int(((np.zeros(d, dtype=np.int64) + b) * strides).sum())
    visits[:, origin_flat] = 1  # every walk starts (and is seen) at 0

    pos = np.zeros((n_walks, d), dtype=np.int64)
    alive = np.arange(n_walks)
    while alive.size:
        survive = rng.random(alive.size) >= p_die
        alive = alive[survive]
        if not alive.size:
            break
        moves = rng.integers(0, 2 * d, size=alive.size)
        axis = moves >> 1
        sign = np.where(moves & 1, 1, -1).astype(np.int64)
        pos[alive, axis] += sign
        live_pos = pos[alive]
        inside = np.all(np.abs(live_pos) <= b, axis=1)
        if inside.any():
            flat = ((live_pos[inside] + b) * strides).sum(axis=1)
            np.add.at(visits, (alive[inside], flat), 1)
    sums = visits.sum(axis=0, dtype=np.int64)
    sq_sums = (visits.astype(np.int64) ** 2).sum(axis=0)
    return sums, sq_sums


def run_killed_walks(cfg):
    """Run the ensemble and tally visits inside the window.

    Returns
    -------
    dict mapping lattice point (tuple of ints) to VisitEstimate, containing
    exactly the points visited at least once.  Deterministic for a fixed
    config: the batch streams are keyed by (seed, batch index) and merged by
    commutative addition.
    """
    d, b = cfg.d, cfg.max_box
    side = 2 * b + 1
    n_points = side ** d
    sums = np.zeros(n_points, dtype=np.int64)
    sq_sums = np.zeros(n_points, dtype=np.int64)
    remaining = cfg.n_walks
    batch_index = 0
    while remaining > 0:
        take = min(_BATCH, remaining)
        s, s2 = _run_batch(cfg, batch_index, take)
        sums += s
        sq_sums += s2
        remaining -= take
        batch_index += 1

    n = cfg.n_walks
    out = {}
    for flat in np.nonzero(sums)[0]:
        coords = []
        rest = int(flat)
        for _ in range(d):
            coords.append(rest % side - b)
            rest //= side
        point = tuple(reversed(coords))
        mean = sums[flat] / n
        if n > 1:
            var = (sq_sums[flat] - n * mean * mean) / (n - 1)
            std_err = math.sqrt(max(var, 0.0) / n)
        else:
            std_err = 0.0
        out[point] = VisitEstimate(
            x=point, mean=float(mean), std_err=float(std_err), n_walks=n
        )
    return out


def estimate_green(cfg, x):
    """Green-function estimate at one point: visits divided by ``1+a^2``.

    Points never visited give a degenerate (0, 0) estimate; ``x`` must lie
    inside the tally window.
    """
    point = tuple(int(c) for c in np.asarray(x).ravel())
    if len(point) != cfg.d:
        raise DomainError(f"x must have {cfg.d} coordinates")
    if any(abs(c) > cfg.max_box for c in point):
        raise DomainError("x lies outside the tally window")
    tallies = run_killed_walks(cfg)
    scale = 1.0 + cfg.a * cfg.a
    est = tallies.get(point)
    if est is None:
        return VisitEstimate(x=point, mean=0.0, std_err=0.0, n_walks=cfg.n_walks)
    return VisitEstimate(
        x=point,
        mean=est.mean / scale,
        std_err=est.std_err / scale,
        n_walks=est.n_walks,
    )


def kill_time_survival(cfg, n_max):
    """Empirical survival counts: walks taking at least n steps, n <= n_max.

    Uses the same per-step Bernoulli killing as the tally runs (separate
    streams); ``counts[n] / n_walks`` estimates ``(1/(1+a^2))^n``.
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    counts = np.zeros(n_max + 1, dtype=np.int64)
    p_die = cfg.death_probability
    remaining = cfg.n_walks
    batch_index = 0
    while remaining > 0:
        take = min(_BATCH, remaining)
        rng = _batch_rng(cfg, 2 ** 32 + batch_index)
        steps = np.zeros(take, dtype=np.int64)
        alive = np.ones(take, dtype=bool)
        while alive.any():
            survive = rng.random(int(alive.sum())) >= p_die
            idx = np.nonzero(alive)[0]
            alive[idx[~survive]] = False
            steps[idx[survive]] += 1
            # survival beyond n_max cannot change any reported count
            alive[steps >= n_max] = False
        counts[0] += take
        for n in range(1, n_max + 1):
            counts[n] += int((steps >= n).sum())
        remaining -= take
        batch_index += 1
    return counts
