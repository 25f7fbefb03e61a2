"""Compiled inner loops for matching games under p-replicator metrics.

These reproduce ``vector_field`` exactly for ``g_sharp = diag(x**p)`` and
``v = A x``; tests pin them against the generic path.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _weights(x, p, out):
    for i in range(x.size):
        if p == 0.0:
            out[i] = 1.0
        elif p == 1.0:
            out[i] = x[i]
        elif p == 2.0:
            out[i] = x[i] * x[i]
        else:
            out[i] = x[i] ** p if x[i] > 0.0 else 0.0


@njit(cache=True)
def _coords_field(A, p, x, d, out):
    """Normal-vector formula (interior and minimal-rank states)."""
    n = x.size
    _weights(x, p, d)
    sd = 0.0
    sdv = 0.0
    for i in range(n):
        vi = 0.0
        for j in range(n):
            vi += A[i, j] * x[j]
        out[i] = d[i] * vi
        sd += d[i]
        sdv += out[i]
    c = sdv / sd
    for i in range(n):
        out[i] -= c * d[i]


@njit(cache=True)
def _speed(x, p, V, d):
    _weights(x, p, d)
    s = 0.0
    for i in range(x.size):
        if d[i] > 0.0:
            s += V[i] * V[i] / d[i]
    return np.sqrt(s)


@njit(cache=True)
def rk4_prep(A, p, x0, h, nsteps):
    n = x0.size
    states = np.empty((nsteps + 1, n))
    speeds = np.empty(nsteps + 1)
    x = x0.copy()
    d = np.empty(n)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    states[0] = x
    for k in range(nsteps):
        _coords_field(A, p, x, d, k1)
        speeds[k] = _speed(x, p, k1, d)
        for i in range(n):
            tmp[i] = x[i] + 0.5 * h * k1[i]
        _coords_field(A, p, tmp, d, k2)
        for i in range(n):
            tmp[i] = x[i] + 0.5 * h * k2[i]
        _coords_field(A, p, tmp, d, k3)
        for i in range(n):
            tmp[i] = x[i] + h * k3[i]
        _coords_field(A, p, tmp, d, k4)
        s = 0.0
        for i in range(n):
            if x[i] > 0.0:
                xi = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if xi <= 0.0:
                    return states[:k + 1], speeds[:k + 1], k
                x[i] = xi
                s += xi
        for i in range(n):
            x[i] /= s
        states[k + 1] = x
    _coords_field(A, p, x, d, k1)
    speeds[nsteps] = _speed(x, p, k1, d)
    return states, speeds, -1


@njit(cache=True)
def _project_simplex(y, out):
    n = y.size
    u = np.sort(y)[::-1]
    css = 0.0
    theta = 0.0
    for i in range(n):
        css += u[i]
        t = (css - 1.0) / (i + 1)
        if u[i] - t > 0.0:
            theta = t
    s = 0.0
    for i in range(n):
        out[i] = max(y[i] - theta, 0.0)
        s += out[i]
    for i in range(n):
        out[i] /= s


@njit(cache=True)
def _euclid_field(A, x, out):
    """Euclidean cone projection of ``A x`` via the best-average superset."""
    n = x.size
    v = np.empty(n)
    base = 0
    free = []
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += A[i, j] * x[j]
        v[i] = s
        if x[i] > 0.0:
            base |= 1 << i
        else:
            free.append(i)
    m = len(free)
    best_avg = -np.inf
    best_mask = base
    best_size = -1
    for sub in range(1 << m):
        mask = base
        for b in range(m):
            if (sub >> b) & 1:
                mask |= 1 << free[b]
        tot = 0.0
        cnt = 0
        for i in range(n):
            if (mask >> i) & 1:
                tot += v[i]
                cnt += 1
        avg = tot / cnt
        if avg > best_avg + 1e-12 or (abs(avg - best_avg) <= 1e-12 and cnt > best_size):
            best_avg = avg
            best_mask = mask
            best_size = cnt
    for i in range(n):
        out[i] = v[i] - best_avg if (best_mask >> i) & 1 else 0.0


@njit(cache=True)
def euler_euclid(A, x0, h, nsteps, snap):
    n = x0.size
    states = np.empty((nsteps + 1, n))
    speeds = np.empty(nsteps + 1)
    x = x0.copy()
    V = np.empty(n)
    y = np.empty(n)
    states[0] = x
    for k in range(nsteps):
        _euclid_field(A, x, V)
        sp = 0.0
        ymin = np.inf
        for i in range(n):
            sp += V[i] * V[i]
            y[i] = x[i] + h * V[i]
            ymin = min(ymin, y[i])
        speeds[k] = np.sqrt(sp)
        if ymin < -10.0 * h:
            return states[:k + 1], speeds[:k + 1], k
        _project_simplex(y, x)
        if snap > 0.0:
            s = 0.0
            for i in range(n):
                if x[i] < snap:
                    x[i] = 0.0
                s += x[i]
            for i in range(n):
                x[i] /= s
        states[k + 1] = x
    _euclid_field(A, x, V)
    speeds[nsteps] = np.sqrt(np.sum(V * V))
    return states, speeds, -1
