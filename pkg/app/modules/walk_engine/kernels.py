"""
Stepping kernels.

Written in the numba-compatible subset so ``app.core.jit.njit`` can compile
them; without numba they run unchanged as Python. Scalar walk state travels
in a small int64 array::

    walker = [position, t, cursor, special, visits, last_h]

and the excursion tracker for the observation vertex in another::

    tracker = [observe, first, second, in_excursion, start, n_first, n_second, last]

where ``start`` and ``last`` are 0 (first) / 1 (second) / -1 (unset).
"""
from app.core.jit import njit

STATUS_OK = 0
STATUS_NEED_UNIFORMS = 1
STATUS_NEED_SCHEDULE = 2
STATUS_SCHEDULE_EXHAUSTED = 3
STATUS_SCHEDULE_VIOLATION = 4

MODE_NONE = 0
MODE_AFFINE = 1
MODE_TABLE = 2
MODE_ADAPTIVE = 3


@njit
def pick_neighbor(indptr, indices, weights, position, u):
    """Neighbor chosen by u in [0, 1) against running prefix sums of weights"""
    lo = indptr[position]
    hi = indptr[position + 1]
    total = 0
    for e in range(lo, hi):
        total += weights[indices[e]]
    target = u * total
    acc = 0
    for e in range(lo, hi):
        acc += weights[indices[e]]
        if target < acc:
            return indices[e]
    # u * total rounded up to total
    return indices[hi - 1]


@njit
def observe_excursion(tracker, hist, position):
    """Feed one arrival into the excursion tracker"""
    if position == tracker[0]:
        if tracker[3] == 1 and tracker[4] >= 0:
            max_m = hist.shape[1] - 1
            if tracker[4] == 0:
                m = tracker[5]
                cls = 0 if tracker[7] == 0 else 1
            else:
                m = tracker[6]
                cls = 2 if tracker[7] == 1 else 3
            if m > max_m:
                m = max_m
            hist[cls, m] += 1
        tracker[3] = 1
        tracker[4] = -1
        tracker[5] = 0
        tracker[6] = 0
        tracker[7] = -1
    elif tracker[3] == 1:
        if position == tracker[1]:
            kind = 0
        elif position == tracker[2]:
            kind = 1
        else:
            return
        if tracker[4] < 0:
            tracker[4] = kind
        if kind == 0:
            tracker[5] += 1
        else:
            tracker[6] += 1
        tracker[7] = kind


@njit
def observe_xi(weights, xi_params, t, xi_range):
    """Running min/max of Z(i)/(Z(i)+Z(j)) once t >= xi_params[2]"""
    if xi_params[0] < 0 or t < xi_params[2]:
        return
    zi = weights[xi_params[0]]
    zj = weights[xi_params[1]]
    xi = zi / (zi + zj)
    if xi < xi_range[0]:
        xi_range[0] = xi
    if xi > xi_range[1]:
        xi_range[1] = xi


@njit
def advance(
    indptr,
    indices,
    weights,
    walker,
    n_steps,
    uniforms,
    mode,
    h0,
    c,
    table,
    tracker,
    hist,
    xi_params,
    xi_range,
):
    """
    Advance the walk by up to ``n_steps`` steps in place.

    Stops early when the uniform block runs out, an adaptive schedule needs
    H(k) from Python, or a schedule value is missing or breaks the increment
    rule. A step onto the special vertex is committed only once its H(k) is
    known and valid: on any schedule status nothing of that step (position,
    t, cursor, visits, weights, trackers) has been written.

    Returns:
        (steps_done, status)
    """
    position = walker[0]
    t = walker[1]
    cursor = walker[2]
    special = walker[3]
    visits = walker[4]
    last_h = walker[5]
    n_uniforms = uniforms.shape[0]
    done = 0
    status = STATUS_OK

    while done < n_steps:
        if cursor >= n_uniforms:
            status = STATUS_NEED_UNIFORMS
            break
        target = pick_neighbor(indptr, indices, weights, position, uniforms[cursor])
        if target == special:
            if mode == MODE_ADAPTIVE:
                status = STATUS_NEED_SCHEDULE
                break
            if mode == MODE_TABLE:
                if visits >= table.shape[0]:
                    status = STATUS_SCHEDULE_EXHAUSTED
                    break
                h = table[visits]
            else:
                h = h0 + c * (visits + 1)
            if h < last_h + 1:
                status = STATUS_SCHEDULE_VIOLATION
                break
            visits += 1
            weights[target] = h
            last_h = h
        else:
            weights[target] += 1

        position = target
        cursor += 1
        t += 1
        done += 1
        if tracker[0] >= 0:
            observe_excursion(tracker, hist, position)
        observe_xi(weights, xi_params, t, xi_range)

    walker[0] = position
    walker[1] = t
    walker[2] = cursor
    walker[4] = visits
    walker[5] = last_h
    return done, status


@njit
def sample_many(indptr, indices, weights, position, uniforms, out):
    """Independent draws of the next position from a frozen state"""
    for n in range(uniforms.shape[0]):
        out[n] = pick_neighbor(indptr, indices, weights, position, uniforms[n])
