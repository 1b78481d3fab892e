"""Random-environment models on the integer lattice.

An environment assigns every site a strictly positive nearest-neighbor
transition vector, drawn i.i.d. across sites from one of four model families.
Quenched environments are generated lazily: the vector at a site is a pure
function of (master seed, site), computed through a counter-based stream, so
the infinite environment needs no storage and any site can be reproduced
bit-identically on any worker.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError
from .lattice import check_dim, check_site, direction_index
from .rng import (
    TAG_SITE,
    U64,
    CounterStream,
    as_u64,
    derive_key,
    stream_normal,
    stream_u01,
    stream_u01_open,
)

ELLIPTICITY_FLOOR = 1e-9
_SUM_TOL = 1e-12


@dataclass(frozen=True)
class TransitionVector:
    """Exit probabilities at one site, indexed by signed unit direction.

    Entries must be strictly positive (ellipticity); they are renormalized to
    sum to one at construction, so the stored vector always satisfies the sum
    invariant to within 1e-12.
    """

    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size % 2 != 0 or arr.size == 0:
            raise ConfigError(f"transition vector needs 2d entries, got shape {arr.shape}")
        check_dim(arr.size // 2)
        if not np.all(arr > 0.0):
            raise ConfigError("transition probabilities must be strictly positive")
        total = float(arr.sum())
        if abs(total - 1.0) > _SUM_TOL:
            arr = arr / total
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def dim(self) -> int:
        return self.probs.size // 2

    def __eq__(self, other) -> bool:
        return isinstance(other, TransitionVector) and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())


@dataclass(frozen=True)
class Homogeneous:
    """Every site carries the same fixed transition vector."""

    vector: TransitionVector

    @property
    def dim(self) -> int:
        return self.vector.dim


@dataclass(frozen=True, eq=False)
class FiniteMixture:
    """Each site independently picks one of finitely many elliptic atoms."""

    atoms: tuple[TransitionVector, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        atoms = tuple(self.atoms)
        if not atoms:
            raise ConfigError("mixture needs at least one atom")
        d = atoms[0].dim
        if any(a.dim != d for a in atoms):
            raise ConfigError("mixture atoms disagree on dimension")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (len(atoms),):
            raise ConfigError("one weight per atom required")
        if not np.all(w > 0.0):
            raise ConfigError("mixture weights must be positive")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ConfigError("mixture weights must sum to 1")
        w = w / w.sum()
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    @property
    def dim(self) -> int:
        return self.atoms[0].dim

    def atom_matrix(self) -> np.ndarray:
        return np.stack([a.probs for a in self.atoms])

    def cum_weights(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.weights))


@dataclass(frozen=True)
class Dirichlet:
    """Site vectors drawn from a Dirichlet law on the 2d-simplex."""

    alphas: tuple[float, ...]

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if len(alphas) % 2 != 0 or not alphas:
            raise ConfigError("Dirichlet needs 2d concentration parameters")
        check_dim(len(alphas) // 2)
        if any(a <= 0.0 for a in alphas):
            raise ConfigError("Dirichlet concentrations must be positive")
        object.__setattr__(self, "alphas", alphas)

    @property
    def dim(self) -> int:
        return len(self.alphas) // 2


@dataclass(frozen=True)
class PerturbedSRW:
    """Simple random walk with probability epsilon moved onto one direction.

    drift_dir uses the signed-axis form: +1 is +e_1, -2 is -e_2, and so on.
    The bound epsilon < 1/(2d) keeps the opposite direction elliptic.
    """

    epsilon: float
    drift_dir: int
    dim: int

    def __post_init__(self):
        check_dim(self.dim)
        axis = abs(int(self.drift_dir))
        if self.drift_dir == 0 or axis > self.dim:
            raise ConfigError(f"drift_dir {self.drift_dir!r} out of range for d={self.dim}")
        if not 0.0 < self.epsilon < 1.0 / (2 * self.dim):
            raise ConfigError("epsilon must lie in (0, 1/(2d))")

    @property
    def vector(self) -> TransitionVector:
        base = np.full(2 * self.dim, 1.0 / (2 * self.dim))
        j = direction_index(abs(self.drift_dir) - 1, 1 if self.drift_dir > 0 else -1)
        base[j] += self.epsilon
        base[j ^ 1] -= self.epsilon
        return TransitionVector(base)


EnvironmentModel = Homogeneous | FiniteMixture | Dirichlet | PerturbedSRW

_GAMMA_COMP_STRIDE = U64(1) << U64(32)
_GAMMA_ROUND_STRIDE = U64(64) << U64(32)
_GAMMA_MAX_ATTEMPTS = 512
_DIRICHLET_MAX_ROUNDS = 64


def _gamma_mt(alpha: float, keys: np.ndarray, base) -> np.ndarray:
    """Marsaglia-Tsang gamma sampler, vectorized over lanes.

    Attempt ``i`` of a lane consumes stream indices base+4i .. base+4i+2; the
    small-alpha boost uniform sits at a fixed slot past the attempt budget, so
    the draw schedule is a pure function of the key.
    """
    boost = alpha < 1.0
    a = alpha + 1.0 if boost else alpha
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(keys.shape[0], dtype=np.float64)
    pending = np.arange(keys.shape[0])
    base = as_u64(base)
    for attempt in range(_GAMMA_MAX_ATTEMPTS):
        with np.errstate(over="ignore"):
            idx = base + U64(4 * attempt)
        k = keys[pending]
        x = stream_normal(k, idx)
        with np.errstate(over="ignore"):
            u = stream_u01_open(k, idx + U64(2))
        v = (1.0 + c * x) ** 3
        ok = v > 0.0
        logv = np.log(np.where(ok, v, 1.0))
        accept = ok & (np.log(u) < 0.5 * x * x + d - d * v + d * logv)
        if accept.any():
            out[pending[accept]] = d * v[accept]
            pending = pending[~accept]
            if pending.size == 0:
                break
    else:
        raise NumericError("gamma sampler failed to accept within the attempt budget")
    if boost:
        with np.errstate(over="ignore"):
            ub = stream_u01_open(keys, base + U64(4 * _GAMMA_MAX_ATTEMPTS))
        out *= ub ** (1.0 / alpha)
    return out


def sample_dirichlet(alphas, stream: CounterStream) -> np.ndarray:
    """Draw one Dirichlet vector per stream lane via independent gammas.

    Vectors with any normalized component below the ellipticity floor are
    rejected and redrawn from a fresh index block, so outputs are always
    usable as elliptic transition vectors.
    """
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.ndim != 1 or alphas.size == 0:
        raise ConfigError("alphas must be a nonempty vector")
    if np.any(alphas <= 0.0):
        raise ConfigError("Dirichlet concentrations must be positive")
    keys = stream.keys
    n, k = keys.shape[0], alphas.size
    out = np.empty((n, k), dtype=np.float64)
    todo = np.arange(n)
    for rnd in range(_DIRICHLET_MAX_ROUNDS):
        with np.errstate(over="ignore"):
            rbase = U64(rnd) * _GAMMA_ROUND_STRIDE
        sub = keys[todo]
        g = np.empty((todo.size, k), dtype=np.float64)
        for j in range(k):
            with np.errstate(over="ignore"):
                g[:, j] = _gamma_mt(float(alphas[j]), sub, rbase + U64(j) * _GAMMA_COMP_STRIDE)
        probs = g / g.sum(axis=1, keepdims=True)
        good = (probs >= ELLIPTICITY_FLOOR).all(axis=1)
        out[todo[good]] = probs[good]
        todo = todo[~good]
        if todo.size == 0:
            return out
    raise NumericError("Dirichlet sampler kept producing sub-elliptic vectors")


def site_stream_keys(env_seed, coords: np.ndarray) -> np.ndarray:
    """Stream keys for a batch of sites: hash of (env seed, tag, coordinates)."""
    coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
    words = [env_seed, TAG_SITE] + [coords[:, a] for a in range(coords.shape[1])]
    keys = derive_key(*words)
    return np.atleast_1d(keys)


def transitions_for(model: EnvironmentModel, env_seeds, coords: np.ndarray) -> np.ndarray:
    """Transition vectors for a batch of sites, one environment seed per row.

    ``env_seeds`` may be a scalar (one shared environment) or a per-row array.
    The result is a (n, 2d) probability matrix; rows are pure functions of
    (seed, site, model).
    """
    coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
    n = coords.shape[0]
    if coords.shape[1] != model.dim:
        raise ConfigError(f"site dimension {coords.shape[1]} does not match model d={model.dim}")
    if isinstance(model, Homogeneous):
        return np.broadcast_to(model.vector.probs, (n, 2 * model.dim))
    if isinstance(model, PerturbedSRW):
        return np.broadcast_to(model.vector.probs, (n, 2 * model.dim))
    keys = site_stream_keys(env_seeds, coords)
    if keys.shape[0] == 1 and n > 1:
        keys = np.broadcast_to(keys, (n,))
    if isinstance(model, FiniteMixture):
        u = stream_u01(keys, 0)
        idx = np.searchsorted(model.cum_weights(), u, side="right")
        np.minimum(idx, len(model.atoms) - 1, out=idx)
        return model.atom_matrix()[idx]
    if isinstance(model, Dirichlet):
        return sample_dirichlet(model.alphas, CounterStream(keys))
    raise ConfigError(f"unknown environment model {type(model).__name__}")


@dataclass
class QuenchedEnvironment:
    """One fixed environment: a pure map (master seed, site) -> transition vector.

    The optional memo cache only affects timing; cached and uncached lookups
    return identical values because the underlying map is pure.
    """

    model: EnvironmentModel
    master_seed: int
    cache_size: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.model.dim

    def transitions_at(self, coords) -> np.ndarray:
        """Vectorized lookup: (n, d) sites -> (n, 2d) probabilities."""
        return transitions_for(self.model, as_u64(self.master_seed), coords)

    def transition_at(self, x) -> TransitionVector:
        site = check_site(x, self.dim)
        key = tuple(int(c) for c in site)
        if self.cache_size > 0:
            with self._lock:
                hit = self._cache.get(key)
            if hit is not None:
                return hit
        vec = TransitionVector(self.transitions_at(site[None, :])[0])
        if self.cache_size > 0:
            with self._lock:
                if len(self._cache) >= self.cache_size:
                    self._cache.pop(next(iter(self._cache)))
                self._cache[key] = vec
        return vec
