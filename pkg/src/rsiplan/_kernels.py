"""Compiled single-flip inner loops for the annealing and tabu samplers.

Both kernels keep the local field ``h_i = linear_i + sum_j Q_ij x_j`` up to date,
so flipping ``x_i`` costs ``+h_i`` (0 -> 1) or ``-h_i`` (1 -> 0). Each read
reseeds numba's thread-local generator, which keeps results reproducible when
several kernels run on different threads.
"""

import numpy as np
from numba import njit

_EPS = 1e-12


@njit(cache=True, nogil=True)
def _init_field(indptr, indices, data, linear, x):
    field = linear.copy()
    e = 0.0
    for i in range(x.size):
        if x[i]:
            e += linear[i]
            for k in range(indptr[i], indptr[i + 1]):
                field[indices[k]] += data[k]
    # each active pair was counted once from each side
    pair = 0.0
    for i in range(x.size):
        if x[i]:
            pair += field[i] - linear[i]
    return field, e + 0.5 * pair


@njit(cache=True, nogil=True)
def _flip(indptr, indices, data, field, x, i):
    if x[i]:
        x[i] = 0
        for k in range(indptr[i], indptr[i + 1]):
            field[indices[k]] -= data[k]
    else:
        x[i] = 1
        for k in range(indptr[i], indptr[i + 1]):
            field[indices[k]] += data[k]


@njit(cache=True, nogil=True)
def anneal(indptr, indices, data, linear, betas, states, seeds, target):
    """Metropolis sweeps over ``betas`` for every row of ``states`` (replaced by best-of-read).

    Once a read's best energy (without offset) reaches ``target`` the remaining
    sweeps and reads are skipped. Returns ``(sweeps, reads_done)``.
    """
    reads, m = states.shape
    sweeps = 0
    done = 0
    for r in range(reads):
        np.random.seed(seeds[r])
        x = states[r].copy()
        field, e = _init_field(indptr, indices, data, linear, x)
        best = x.copy()
        best_e = e
        for beta in betas:
            for i in range(m):
                d = -field[i] if x[i] else field[i]
                if d > 0.0:
                    t = beta * d
                    if t > 40.0 or np.random.random() >= np.exp(-t):
                        continue
                _flip(indptr, indices, data, field, x, i)
                e += d
            sweeps += 1
            if e < best_e - _EPS:
                best_e = e
                best[:] = x
            if best_e <= target:
                break
        states[r] = best
        done += 1
        if best_e <= target:
            break
    return sweeps, done


@njit(cache=True, nogil=True)
def tabu(indptr, indices, data, linear, states, seeds, iters, tenure, target):
    """Steepest single-flip descent with a tabu tenure and best-so-far aspiration.

    Stops a read early once its best energy (without offset) reaches ``target``.
    Equal-delta moves are chosen uniformly at random.
    """
    reads, m = states.shape
    steps = 0
    for r in range(reads):
        np.random.seed(seeds[r])
        x = states[r].copy()
        field, e = _init_field(indptr, indices, data, linear, x)
        best = x.copy()
        best_e = e
        tabu_until = np.zeros(m, dtype=np.int64)
        for it in range(iters):
            if best_e <= target:
                break
            pick = -1
            pick_d = np.inf
            ties = 0
            for i in range(m):
                d = -field[i] if x[i] else field[i]
                if tabu_until[i] > it and not (e + d < best_e - _EPS):
                    continue
                if d < pick_d - _EPS:
                    pick = i
                    pick_d = d
                    ties = 1
                elif d <= pick_d + _EPS:
                    ties += 1
                    if np.random.random() * ties < 1.0:
                        pick = i
            steps += 1
            if pick < 0:
                continue
            _flip(indptr, indices, data, field, x, pick)
            e += pick_d
            tabu_until[pick] = it + 1 + tenure
            if e < best_e - _EPS:
                best_e = e
                best[:] = x
        states[r] = best
    return steps
