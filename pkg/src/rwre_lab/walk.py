"""Quenched trajectory simulation and path stopping times.

Walkers advance in lockstep as numpy batches.  The step taken by walker ``w``
at time ``t`` depends only on (walker seed, t) and on the environment at the
current site, so ensembles are reproducible and independent of batch layout,
thread count, and scheduling order.  Stopping times on finite paths return an
explicit not-by-horizon marker instead of a large sentinel; downstream
estimators must treat that as censoring.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .env import EnvironmentModel, QuenchedEnvironment, transitions_for
from .errors import ConfigError
from .lattice import decode_signed_axis, encode_signed_axis, step_table
from .rng import TAG_ENV, TAG_STEP, TAG_WALKER, derive_key, stream_u01

DEFAULT_CHUNK = 1024  # fixed batch width; must not depend on thread count


def _u64_array(values) -> np.ndarray:
    return np.asarray(
        [int(v) & 0xFFFFFFFFFFFFFFFF for v in values], dtype=np.uint64
    )


@dataclass(eq=False)
class Trajectory:
    """A finite lattice path started at the origin.

    ``steps`` holds direction indices (see lattice.py); positions are
    reconstructed exactly in integer arithmetic.
    """

    steps: np.ndarray
    dim: int
    walker_seed: int
    env_seed: int | None = None

    def __post_init__(self):
        self.steps = np.asarray(self.steps, dtype=np.int8)
        self.steps.setflags(write=False)

    def __len__(self) -> int:
        return self.steps.shape[0]

    def positions(self) -> np.ndarray:
        """(N+1, d) int64 positions X_0 = 0, ..., X_N."""
        out = np.zeros((len(self) + 1, self.dim), dtype=np.int64)
        if len(self):
            np.cumsum(step_table(self.dim)[self.steps], axis=0, out=out[1:])
        return out

    def final_position(self) -> np.ndarray:
        return self.positions()[-1]

    def to_json_obj(self) -> dict:
        return {
            "walker_seed": int(self.walker_seed),
            "dim": int(self.dim),
            "steps": [encode_signed_axis(int(j)) for j in self.steps],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Trajectory":
        d = int(obj["dim"])
        steps = [decode_signed_axis(s, d) for s in obj["steps"]]
        return cls(np.asarray(steps, dtype=np.int8), d, int(obj["walker_seed"]))


@dataclass(frozen=True)
class StopResult:
    """Outcome of a stopping time on a finite path: hit at ``time`` or censored."""

    time: int | None

    @property
    def hit(self) -> bool:
        return self.time is not None

    @classmethod
    def at(cls, time: int) -> "StopResult":
        return cls(int(time))

    @classmethod
    def not_by_horizon(cls) -> "StopResult":
        return cls(None)


class Side(Enum):
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True)
class SlabExit:
    side: Side | None
    time: int | None


def _check_l(l) -> np.ndarray:
    arr = np.asarray(l)
    if arr.ndim != 1 or not np.any(arr != 0):
        raise ConfigError("direction l must be a nonzero vector")
    return arr


def walker_seed_for(master_seed: int, walker_id: int) -> int:
    return int(derive_key(master_seed, TAG_WALKER, walker_id))


def env_seed_for(master_seed: int, walker_id: int) -> int:
    return int(derive_key(master_seed, TAG_ENV, walker_id))


def _simulate_block(
    model: EnvironmentModel,
    env_seeds: np.ndarray,
    walker_seeds: np.ndarray,
    horizon: int,
) -> np.ndarray:
    """Lockstep kernel: returns the (n, horizon) int8 matrix of direction indices."""
    d = model.dim
    table = step_table(d)
    step_keys = derive_key(walker_seeds, TAG_STEP)
    pos = np.zeros((walker_seeds.shape[0], d), dtype=np.int64)
    steps = np.empty((walker_seeds.shape[0], horizon), dtype=np.int8)
    const_cum = np.cumsum(model.vector.probs) if hasattr(model, "vector") else None
    for t in range(horizon):
        u = stream_u01(step_keys, t)
        if const_cum is not None:
            j = np.searchsorted(const_cum, u, side="right")
        else:
            w = transitions_for(model, env_seeds, pos)
            j = (np.cumsum(w, axis=1) <= u[:, None]).sum(axis=1)
        j = np.minimum(j, 2 * d - 1)
        steps[:, t] = j
        pos += table[j]
    return steps


def simulate(env: QuenchedEnvironment, walker_seed: int, horizon: int) -> Trajectory:
    """One quenched trajectory of ``horizon`` steps.

    Deterministic given (env, walker_seed, horizon); a longer horizon extends
    the path without rewriting its prefix.
    """
    if horizon < 0:
        raise ConfigError("horizon must be nonnegative")
    steps = _simulate_block(
        env.model,
        _u64_array([env.master_seed]),
        _u64_array([walker_seed]),
        horizon,
    )
    return Trajectory(steps[0], env.dim, int(walker_seed), env_seed=env.master_seed)


def _chunk_bounds(n: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def _map_chunks(fn: Callable, bounds: list[tuple[int, int]], threads: int) -> list:
    """Apply ``fn(lo, hi)`` over fixed chunks; results come back in chunk order."""
    if threads <= 1 or len(bounds) <= 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return [f.result() for f in [pool.submit(fn, lo, hi) for lo, hi in bounds]]


def ensemble_seeds(master_seed: int, n_walks: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-walker (environment seed, walker seed) arrays, derived from the master."""
    ids = np.arange(n_walks, dtype=np.int64)
    return derive_key(master_seed, TAG_ENV, ids), derive_key(master_seed, TAG_WALKER, ids)


def simulate_ensemble(
    model: EnvironmentModel,
    master_seed: int,
    n_walks: int,
    horizon: int,
    threads: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> list[Trajectory]:
    """Annealed ensemble: walker ``i`` gets its own environment and walk stream.

    Both streams derive from (master_seed, i), so the ensemble is reproducible
    walker by walker regardless of chunking or thread count.
    """
    if horizon < 0 or n_walks < 0:
        raise ConfigError("n_walks and horizon must be nonnegative")
    env_seeds, walk_seeds = ensemble_seeds(master_seed, n_walks)
    bounds = _chunk_bounds(n_walks, chunk)

    def run(lo: int, hi: int) -> np.ndarray:
        return _simulate_block(model, env_seeds[lo:hi], walk_seeds[lo:hi], horizon)

    blocks = _map_chunks(run, bounds, threads)
    out: list[Trajectory] = []
    for (lo, hi), block in zip(bounds, blocks):
        for i in range(lo, hi):
            out.append(
                Trajectory(block[i - lo], model.dim, int(walk_seeds[i]), env_seed=int(env_seeds[i]))
            )
    return out


def first_passage(traj: Trajectory, l, s: float) -> StopResult:
    """Least n with X_n . l > s (strict), else not-by-horizon."""
    lv = traj.positions() @ _check_l(l)
    mask = lv > s
    if not mask.any():
        return StopResult.not_by_horizon()
    return StopResult.at(int(np.argmax(mask)))


def backtrack_time(traj: Trajectory, l) -> StopResult:
    """Least n >= 1 with X_n . l < X_0 . l, else not-by-horizon."""
    lv = traj.positions() @ _check_l(l)
    mask = lv[1:] < lv[0]
    if not mask.any():
        return StopResult.not_by_horizon()
    return StopResult.at(int(np.argmax(mask)) + 1)


def region_exit_time(traj: Trajectory, region: Callable[[np.ndarray], np.ndarray]) -> StopResult:
    """Least n with X_n outside the region, else not-by-horizon.

    ``region`` is a vectorized membership predicate: it receives an (m, d)
    int array of sites and returns a boolean mask of the same length.
    """
    pos = traj.positions()
    inside = np.asarray(region(pos), dtype=bool)
    if inside.shape != (pos.shape[0],):
        raise ConfigError("region predicate must return one boolean per site")
    if not inside[0]:
        raise ValueError("region must contain the starting site")
    outside = ~inside
    if not outside.any():
        return StopResult.not_by_horizon()
    return StopResult.at(int(np.argmax(outside)))


def half_space(l, level: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """Region {x : x . l >= level}."""
    lv = np.asarray(l)
    return lambda pts: pts @ lv >= level


def slab_region(l_prime, b: float, L: float) -> Callable[[np.ndarray], np.ndarray]:
    """Open slab {x : -bL < x . l' < L}."""
    lp = np.asarray(l_prime, dtype=np.float64)
    return lambda pts: (pts @ lp > -b * L) & (pts @ lp < L)


def shifted_cone_region(spec, apex) -> Callable[[np.ndarray], np.ndarray]:
    """Region apex + cone, exact integer arithmetic via the cone's matrix."""
    a = np.asarray(apex, dtype=np.int64)
    mat = spec.matrix
    return lambda pts: ((pts - a) @ mat.T >= 0).all(axis=1)


def slab_exit_side(traj: Trajectory, l_prime, b: float, L: float) -> SlabExit:
    """Which side of the slab the path exits first; boundary sites count as exits."""
    if b <= 0 or L <= 0:
        raise ConfigError("slab parameters b and L must be positive")
    proj = traj.positions() @ np.asarray(l_prime, dtype=np.float64)
    right = proj >= L
    left = proj <= -b * L
    out = right | left
    if not out.any():
        return SlabExit(None, None)
    t = int(np.argmax(out))
    return SlabExit(Side.RIGHT if right[t] else Side.LEFT, t)


@dataclass(frozen=True)
class SlabTally:
    """Exit-side counts for a slab ensemble; censored walks never exited."""

    n_right: int
    n_left: int
    n_censored: int
    n_walks: int

    @property
    def p_right(self) -> float:
        exits = self.n_right + self.n_left
        return self.n_right / exits if exits else float("nan")

    @property
    def p_left(self) -> float:
        exits = self.n_right + self.n_left
        return self.n_left / exits if exits else float("nan")


def _slab_block(
    model: EnvironmentModel,
    env_seeds: np.ndarray,
    walker_seeds: np.ndarray,
    l_prime: np.ndarray,
    b: float,
    L: float,
    horizon: int,
) -> tuple[int, int, int]:
    d = model.dim
    table = step_table(d)
    step_keys = derive_key(walker_seeds, TAG_STEP)
    env_keys = env_seeds.copy()
    pos = np.zeros((walker_seeds.shape[0], d), dtype=np.int64)
    const_cum = np.cumsum(model.vector.probs) if hasattr(model, "vector") else None
    n_right = n_left = 0
    for t in range(horizon):
        if step_keys.shape[0] == 0:
            break
        u = stream_u01(step_keys, t)
        if const_cum is not None:
            j = np.searchsorted(const_cum, u, side="right")
        else:
            w = transitions_for(model, env_keys, pos)
            j = (np.cumsum(w, axis=1) <= u[:, None]).sum(axis=1)
        j = np.minimum(j, 2 * d - 1)
        pos += table[j]
        proj = pos @ l_prime
        right = proj >= L
        left = proj <= -b * L
        done = right | left
        if done.any():
            n_right += int(right.sum())
            n_left += int(left.sum())
            keep = ~done
            pos = pos[keep]
            step_keys = step_keys[keep]
            env_keys = env_keys[keep]
    return n_right, n_left, int(step_keys.shape[0])


def run_slab_ensemble(
    model: EnvironmentModel,
    master_seed: int,
    n_walks: int,
    l_prime,
    b: float,
    L: float,
    horizon: int,
    threads: int = 1,
    chunk: int = DEFAULT_CHUNK * 8,
) -> SlabTally:
    """Annealed slab-exit tally with early stopping per walker."""
    if b <= 0 or L <= 0:
        raise ConfigError("slab parameters b and L must be positive")
    lp = np.asarray(l_prime, dtype=np.float64)
    if lp.shape != (model.dim,):
        raise ConfigError("l_prime dimension mismatch")
    env_seeds, walk_seeds = ensemble_seeds(master_seed, n_walks)
    bounds = _chunk_bounds(n_walks, chunk)

    def run(lo: int, hi: int):
        return _slab_block(model, env_seeds[lo:hi], walk_seeds[lo:hi], lp, b, L, horizon)

    parts = _map_chunks(run, bounds, threads)
    n_right = sum(p[0] for p in parts)
    n_left = sum(p[1] for p in parts)
    n_censored = sum(p[2] for p in parts)
    return SlabTally(n_right, n_left, n_censored, n_walks)


def step_counts(traj: Trajectory) -> np.ndarray:
    """Empirical count of each direction index along the path."""
    return np.bincount(traj.steps, minlength=2 * traj.dim)


def trajectories_to_jsonl(trajs: Sequence[Trajectory]) -> list[dict]:
    return [t.to_json_obj() for t in trajs]
