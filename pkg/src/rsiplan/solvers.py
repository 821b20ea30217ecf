"""Classical QUBO samplers: annealing, tabu, exhaustive search and a hybrid.

The hybrid is a decomposing sampler: from a shared incumbent it runs tabu
search, simulated annealing and an exact (or intensively annealed) solve of a
clamped high-impact subproblem, keeps the best result and stops once the
incumbent stalls.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

import numpy as np

from . import _kernels
from .qubo import Qubo, energies

SEED_MASK = (1 << 64) - 1
BRUTE_FORCE_MAX_VARS = 24
EXACT_SUBPROBLEM_MAX_VARS = 20


@dataclass(frozen=True)
class SolverParams:
    """Knobs shared by all samplers.

    ``max_iters``, ``convergence_iters`` and ``max_subproblem_size`` only
    affect :func:`hybrid_solve`. ``tabu_tenure`` and ``tabu_iters`` default to
    ``min(20, max(4, M // 4))`` and ``max(sweeps, 10 * M)``. ``energy_threshold``
    lets every sampler stop as soon as a sample at or below it is found.
    """

    seed: int = 0
    num_reads: int = 50
    sweeps: int = 1000
    beta_range: Optional[tuple[float, float]] = None
    tabu_tenure: Optional[int] = None
    tabu_iters: Optional[int] = None
    max_iters: int = 100
    convergence_iters: int = 3
    max_subproblem_size: int = 50
    energy_threshold: Optional[float] = None
    parallel: bool = False

    def __post_init__(self):
        for name in ("num_reads", "sweeps", "max_iters", "convergence_iters", "max_subproblem_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        for name in ("tabu_tenure", "tabu_iters"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.beta_range is not None:
            lo, hi = self.beta_range
            if not 0 < lo < hi:
                raise ValueError("beta_range must satisfy 0 < beta_min < beta_max")


@dataclass
class SampleSet:
    """Distinct samples sorted by ascending energy, ties in lexicographic order."""

    samples: np.ndarray
    energies: np.ndarray
    occurrences: np.ndarray
    info: dict = field(default_factory=dict)

    @classmethod
    def from_states(cls, q: Qubo, states: np.ndarray, info: Optional[dict] = None) -> "SampleSet":
        states = np.asarray(states, dtype=np.int8).reshape(-1, q.num_vars)
        uniq, counts = np.unique(states, axis=0, return_counts=True)
        e = energies(q, uniq)
        order = np.argsort(e, kind="stable")
        return cls(uniq[order], e[order], counts[order], dict(info or {}))

    def __len__(self) -> int:
        return self.energies.size

    def __iter__(self) -> Iterator[tuple[np.ndarray, float, int]]:
        for x, e, n in zip(self.samples, self.energies, self.occurrences):
            yield x, float(e), int(n)

    @property
    def first(self) -> tuple[np.ndarray, float]:
        return self.samples[0], float(self.energies[0])


def derive_seed(seed: int, *key: int) -> int:
    """Independent 64-bit stream for ``key`` under a master seed."""
    ss = np.random.SeedSequence(int(seed) & SEED_MASK, spawn_key=tuple(int(k) for k in key))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def _read_seeds(seed: int, n: int) -> np.ndarray:
    return np.random.SeedSequence(int(seed) & SEED_MASK).generate_state(n, dtype=np.uint32)


def _initial(q: Qubo, p: SolverParams, initial_states) -> np.ndarray:
    m = q.num_vars
    if initial_states is None:
        rng = np.random.default_rng(derive_seed(p.seed, 0x1A17))
        return rng.integers(0, 2, size=(p.num_reads, m), dtype=np.int8)
    init = np.asarray(initial_states, dtype=np.int8)
    if init.ndim == 1:
        init = np.tile(init, (p.num_reads, 1))
    if init.shape != (p.num_reads, m):
        raise ValueError(f"initial_states must have shape ({m},) or ({p.num_reads}, {m})")
    return init.copy()


def default_beta_range(q: Qubo) -> tuple[float, float]:
    """Hot end accepts the largest possible uphill move half the time; at the
    cold end the smallest nonzero move is accepted about once per hundred
    sweeps (1 % odds spread over all M variables of a sweep)."""
    m = q.num_vars
    a = np.abs(q.values)
    mags = np.abs(q.linear) + np.bincount(q.rows, a, m) + np.bincount(q.cols, a, m)
    de_max = float(mags.max()) if mags.size else 0.0
    coeffs = np.concatenate([np.abs(q.linear), np.abs(q.values)])
    coeffs = coeffs[coeffs > 0]
    if de_max <= 0 or coeffs.size == 0:
        return (0.1, 1.0)
    lo, hi = math.log(2) / de_max, math.log(100 * m) / float(coeffs.min())
    return (lo, hi) if lo < hi else (hi, lo * 10)


def _tenure(p: SolverParams, m: int) -> int:
    return p.tabu_tenure if p.tabu_tenure is not None else min(20, max(4, m // 4))


def _trivial(q: Qubo, name: str, p: SolverParams, t0: float) -> SampleSet:
    return SampleSet(np.zeros((1, 0), dtype=np.int8), np.array([q.offset]), np.ones(1, dtype=np.int64),
                     {"solver": name, "seed": p.seed, "wall_time": time.perf_counter() - t0, "iterations": 0})


def simulated_anneal(q: Qubo, params: Optional[SolverParams] = None, initial_states=None) -> SampleSet:
    """``num_reads`` independent single-flip Metropolis runs on a geometric beta schedule.

    With ``energy_threshold`` set, sampling stops at the first read that reaches it.
    """
    p = params or SolverParams()
    t0 = time.perf_counter()
    if q.num_vars == 0:
        return _trivial(q, "sa", p, t0)
    states = _initial(q, p, initial_states)
    lo, hi = p.beta_range or default_beta_range(q)
    betas = np.geomspace(lo, hi, p.sweeps)
    target = -np.inf if p.energy_threshold is None else p.energy_threshold - q.offset
    indptr, indices, data = q.csr()
    sweeps, done = _kernels.anneal(indptr, indices, data, q.linear, betas, states,
                                   _read_seeds(p.seed, p.num_reads), target)
    return SampleSet.from_states(q, states[:done], {
        "solver": "sa", "seed": p.seed, "wall_time": time.perf_counter() - t0,
        "iterations": int(sweeps), "beta_range": (lo, hi),
    })


def tabu_search(q: Qubo, params: Optional[SolverParams] = None, initial_states=None) -> SampleSet:
    """Steepest-descent single-flip tabu search, one random restart per read."""
    p = params or SolverParams()
    t0 = time.perf_counter()
    m = q.num_vars
    if m == 0:
        return _trivial(q, "tabu", p, t0)
    states = _initial(q, p, initial_states)
    iters = p.tabu_iters if p.tabu_iters is not None else max(p.sweeps, 10 * m)
    target = -np.inf if p.energy_threshold is None else p.energy_threshold - q.offset
    indptr, indices, data = q.csr()
    steps = _kernels.tabu(indptr, indices, data, q.linear, states, _read_seeds(p.seed, p.num_reads),
                          iters, _tenure(p, m), target)
    return SampleSet.from_states(q, states, {
        "solver": "tabu", "seed": p.seed, "wall_time": time.perf_counter() - t0,
        "iterations": int(steps), "tenure": _tenure(p, m),
    })


def brute_force(q: Qubo, keep: Optional[int] = None) -> SampleSet:
    """Enumerate all ``2**M`` assignments (``M <= 24``), optionally keeping the best ``keep``.

    Bit ``i`` of the enumeration counter is variable ``i``.
    """
    t0 = time.perf_counter()
    m = q.num_vars
    if m > BRUTE_FORCE_MAX_VARS:
        raise ValueError(f"brute force refuses {m} variables (limit {BRUTE_FORCE_MAX_VARS})")
    if keep is not None and keep < 1:
        raise ValueError("keep must be positive")
    upper = q.dense()
    bits = np.arange(m, dtype=np.int64)
    total = 1 << m
    chunk = 1 << min(m, 16)
    kept_codes, kept_e = [], []
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        x = ((codes[:, None] >> bits) & 1).astype(np.float64)
        e = np.einsum("ij,ij->i", x @ upper, x) + q.offset
        if keep is not None and codes.size > keep:
            sel = np.lexsort((codes, e))[:keep]
            codes, e = codes[sel], e[sel]
        kept_codes.append(codes)
        kept_e.append(e)
    codes = np.concatenate(kept_codes)
    e = np.concatenate(kept_e)
    order = np.lexsort((codes, e))
    if keep is not None:
        order = order[:keep]
    codes, e = codes[order], e[order]
    samples = ((codes[:, None] >> bits) & 1).astype(np.int8)
    return SampleSet(samples, e, np.ones(codes.size, dtype=np.int64), {
        "solver": "exact", "seed": None, "wall_time": time.perf_counter() - t0, "iterations": total,
    })


def local_fields(q: Qubo, x) -> np.ndarray:
    """``linear_i + sum_j Q_ij x_j`` for every variable."""
    m = q.num_vars
    xf = np.asarray(x, dtype=np.float64)
    return (q.linear + np.bincount(q.rows, q.values * xf[q.cols], m)
            + np.bincount(q.cols, q.values * xf[q.rows], m))


def select_subproblem(q: Qubo, x_best, k: int) -> list[int]:
    """The ``k`` variables with the largest ``|local field|`` under ``x_best`` (ties by index)."""
    m = q.num_vars
    if not 0 <= k <= m:
        raise ValueError(f"k must be in [0, {m}]")
    score = np.abs(local_fields(q, x_best))
    order = np.lexsort((np.arange(m), -score))
    return [int(i) for i in order[:k]]


def clamp(q: Qubo, x, free) -> Qubo:
    """Sub-QUBO over ``free`` (in sorted order) with every other variable fixed to ``x``.

    Its energy on ``y`` equals the full energy of ``x`` with ``free`` set to ``y``.
    """
    x = np.asarray(x, dtype=np.float64)
    free = np.unique(np.asarray(free, dtype=np.int64))
    m = q.num_vars
    pos = np.full(m, -1, dtype=np.int64)
    pos[free] = np.arange(free.size)
    fixed_x = x.copy()
    fixed_x[free] = 0.0

    # fixed-fixed part goes into the offset
    offset = q.offset + float(q.linear @ fixed_x + np.dot(q.values, fixed_x[q.rows] * fixed_x[q.cols]))
    linear = local_fields(q, fixed_x)[free]
    mask = (pos[q.rows] >= 0) & (pos[q.cols] >= 0)
    rows, cols = pos[q.rows[mask]], pos[q.cols[mask]]
    order = np.lexsort((cols, rows))
    return Qubo(linear, rows[order], cols[order], q.values[mask][order], offset)


def _subproblem_branch(q: Qubo, x: np.ndarray, p: SolverParams, seed: int) -> np.ndarray:
    k = min(p.max_subproblem_size, q.num_vars)
    free = np.array(sorted(select_subproblem(q, x, k)), dtype=np.int64)
    sub = clamp(q, x, free)
    if free.size <= EXACT_SUBPROBLEM_MAX_VARS:
        y = brute_force(sub, keep=1).samples[0]
    else:
        res = simulated_anneal(sub, replace(p, seed=seed, num_reads=10, beta_range=None))
        y = res.samples[0]
        current = x[free]
        if res.energies[0] > energies(sub, current)[0]:
            y = current
    out = x.copy()
    out[free] = y
    return out


def _branches(q: Qubo, x: np.ndarray, p: SolverParams, rnd: int):
    s_tabu, s_sa, s_sub = (derive_seed(p.seed, rnd, b) for b in range(3))
    return [
        lambda: tabu_search(q, replace(p, seed=s_tabu, num_reads=1), initial_states=x).samples[0],
        lambda: simulated_anneal(q, replace(p, seed=s_sa, num_reads=1), initial_states=x).samples[0],
        lambda: _subproblem_branch(q, x, p, s_sub),
    ]


def hybrid_solve(q: Qubo, params: Optional[SolverParams] = None, initial_state=None) -> SampleSet:
    """Round-based tabu / annealing / subproblem hybrid over a shared incumbent.

    Each round runs the three branches from a snapshot of the incumbent and
    adopts the best result if it improves the incumbent. The run stops after
    ``max_iters`` rounds, after ``convergence_iters`` rounds without improvement,
    or when ``energy_threshold`` is reached. Branch seeds depend only on
    ``(seed, round, branch)``, so threaded and sequential schedules agree.
    """
    p = params or SolverParams()
    t0 = time.perf_counter()
    m = q.num_vars
    if m == 0:
        return _trivial(q, "hybrid", p, t0)
    if initial_state is None:
        rng = np.random.default_rng(derive_seed(p.seed, 0x1A17))
        incumbent = rng.integers(0, 2, size=m, dtype=np.int8)
    else:
        incumbent = np.asarray(initial_state, dtype=np.int8).copy()
        if incumbent.shape != (m,):
            raise ValueError(f"initial_state must have shape ({m},)")
    e_inc = float(energies(q, incumbent)[0])
    trace = [e_inc]
    stale = 0
    rounds = 0
    last: list[np.ndarray] = []
    pool = ThreadPoolExecutor(max_workers=3) if p.parallel else None
    try:
        while rounds < p.max_iters:
            if p.energy_threshold is not None and e_inc <= p.energy_threshold:
                break
            jobs = _branches(q, incumbent.copy(), p, rounds)
            if pool is not None:
                last = list(pool.map(lambda f: f(), jobs))
            else:
                last = [f() for f in jobs]
            branch_e = energies(q, np.stack(last))
            b = int(np.argmin(branch_e))
            rounds += 1
            if branch_e[b] < e_inc - 1e-9:
                incumbent, e_inc, stale = last[b].astype(np.int8), float(branch_e[b]), 0
            else:
                stale += 1
            trace.append(e_inc)
            if stale >= p.convergence_iters:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    states = np.stack([incumbent] + [s.astype(np.int8) for s in last])
    return SampleSet.from_states(q, states, {
        "solver": "hybrid", "seed": p.seed, "wall_time": time.perf_counter() - t0,
        "iterations": rounds, "trace": trace,
    })


SOLVERS = {
    "sa": simulated_anneal,
    "tabu": tabu_search,
    "hybrid": hybrid_solve,
    "exact": lambda q, params=None: brute_force(q),
}
