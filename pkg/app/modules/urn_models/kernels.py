"""Urn stepping kernels (numba-compatible)"""
from app.core.jit import njit


@njit
def urn_advance(xy, a, b, c, d, uniforms):
    """Apply one draw per uniform to xy = [X, Y] in place"""
    x = xy[0]
    y = xy[1]
    for i in range(uniforms.shape[0]):
        if uniforms[i] * (x + y) < x:
            x += a
            y += b
        else:
            x += c
            y += d
    xy[0] = x
    xy[1] = y


@njit
def multi_polya_advance(counts, uniforms):
    """One draw per uniform; the drawn color gains a ball"""
    t = 0
    for i in range(counts.shape[0]):
        t += counts[i]
    for n in range(uniforms.shape[0]):
        target = uniforms[n] * t
        acc = 0
        color = counts.shape[0] - 1
        for i in range(counts.shape[0]):
            acc += counts[i]
            if target < acc:
                color = i
                break
        counts[color] += 1
        t += 1


@njit
def coupled_advance(state, h0, c, uniforms, gap):
    """
    Shared-uniform coupling of the modified triangle walk and the urn.

    state = [U, V, W, position (0 or 1), k, Y_prime] as floats. Uniform 2n
    decides both the walk's move from its current vertex and the urn draw;
    uniform 2n+1 picks the exit from the special vertex. ``gap[n]`` receives
    W - Y_prime after step n.
    """
    U = state[0]
    V = state[1]
    W = state[2]
    pos = state[3]
    k = state[4]
    yp = state[5]
    steps = gap.shape[0]
    for n in range(steps):
        u = uniforms[2 * n]
        x = U + V
        other = V if pos == 0.0 else U
        if u * (x + yp) < yp:
            yp += 1.0
        if u * (other + W) < W:
            k += 1.0
            W = h0 + c * k
            if uniforms[2 * n + 1] * (U + V) < U:
                pos = 0.0
                U += 1.0
            else:
                pos = 1.0
                V += 1.0
        else:
            pos = 1.0 - pos
            if pos == 0.0:
                U += 1.0
            else:
                V += 1.0
        gap[n] = W - yp
    state[0] = U
    state[1] = V
    state[2] = W
    state[3] = pos
    state[4] = k
    state[5] = yp
