"""Compiled inner loop for batched controller rollouts.

All randomness is drawn by the caller (numpy ``Generator``) and passed in
as a block of uniforms ``u[t, r, k]`` for step ``t``, role ``r`` and sample
``k``. Roles: 0 action choice, 1 corruption decision, 2 corruption draw,
3 termination draw. The kernel itself is pure.
"""

import numba
import numpy as np

LOCAL = 0
GLOBAL = 1

STOP_PROB = 0
STOP_PREDICATE = 1
STOP_COUNT = 2


@numba.njit(cache=True)
def advance(state, alive, steps, u, step_tab, cdf, nbr, deg, p_noise, corruption,
            stop_kind, beta, stop_mask, max_steps, trace, record):
    """Advance every live sample through ``u.shape[0]`` steps at most.

    Returns the number of steps consumed (stops early once all samples have
    terminated). With ``record`` set, ``trace[t, k]`` receives the state after
    step ``t`` or -1 once sample ``k`` has stopped.
    """
    n_samples = state.shape[0]
    n_actions = cdf.shape[1]
    n_states = step_tab.shape[0]
    for t in range(u.shape[0]):
        live = 0
        for k in range(n_samples):
            if not alive[k]:
                if record:
                    trace[t, k] = -1
                continue
            s = state[k]
            a = 0
            while a < n_actions - 1 and u[t, 0, k] >= cdf[s, a]:
                a += 1
            nxt = step_tab[s, a]
            if u[t, 1, k] < p_noise:
                if corruption == LOCAL:
                    nxt = nbr[s, int(u[t, 2, k] * deg[s])]
                else:
                    nxt = int(u[t, 2, k] * n_states)
            state[k] = nxt
            steps[k] += 1
            if record:
                trace[t, k] = nxt
            if stop_kind == STOP_PROB:
                done = u[t, 3, k] < beta
            elif stop_kind == STOP_PREDICATE:
                done = stop_mask[nxt]
            else:
                done = steps[k] >= max_steps
            if done:
                alive[k] = False
            else:
                live += 1
        if live == 0:
            return t + 1
    return u.shape[0]


def warmup():
    """Force compilation (or cache load) outside of timed regions."""
    state = np.zeros(1, dtype=np.int64)
    alive = np.ones(1, dtype=np.bool_)
    steps = np.zeros(1, dtype=np.int64)
    u = np.zeros((1, 4, 1))
    tab = np.zeros((1, 1), dtype=np.int64)
    cdf = np.ones((1, 1))
    advance(state, alive, steps, u, tab, cdf, tab, np.ones(1, dtype=np.int64), 0.0,
            LOCAL, STOP_COUNT, 0.0, np.zeros(1, dtype=np.bool_), 1,
            np.zeros((1, 1), dtype=np.int64), True)
