"""Hot loops in machine precision.

Each kernel exists twice: a numba-compiled scalar loop and a vectorized numpy
fallback with identical results.  The fallback is used when numba is missing or
when ``MARKOVSYMP_DISABLE_NUMBA=1`` is set.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - depends on the environment
    if os.environ.get("MARKOVSYMP_DISABLE_NUMBA", "") not in ("", "0"):
        raise ImportError("disabled by environment")
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# brute-force Markov triples ---------------------------------------------------

def _scan_py(bound: int, out: np.ndarray) -> int:
    # x <= y <= z <= bound with x^2+y^2+z^2 = 3xyz; z is a root of z^2 - 3xy z + x^2 + y^2
    n = 0
    x = 1
    while x * x <= bound:
        y = x
        while x * y <= bound:
            d = 9 * x * x * y * y - 4 * x * x - 4 * y * y
            if d >= 0:
                r = int(np.sqrt(float(d)))
                while r * r > d:
                    r -= 1
                while (r + 1) * (r + 1) <= d:
                    r += 1
                if r * r == d:
                    s = 3 * x * y
                    for z2 in (s - r, s + r):
                        if z2 % 2 == 0:
                            z = z2 // 2
                            if y <= z <= bound:
                                if n == 0 or not (out[n - 1, 0] == x and out[n - 1, 1] == y and out[n - 1, 2] == z):
                                    if n < out.shape[0]:
                                        out[n, 0] = x
                                        out[n, 1] = y
                                        out[n, 2] = z
                                    n += 1
            y += 1
        x += 1
    return n


def _scan_numpy(bound: int) -> np.ndarray:
    found = []
    x = 1
    while x * x <= bound:
        y = np.arange(x, bound // x + 1, dtype=np.int64)
        d = 9 * x * x * y * y - 4 * x * x - 4 * y * y
        ok = d >= 0
        y, d = y[ok], d[ok]
        r = np.floor(np.sqrt(d.astype(np.float64))).astype(np.int64)
        r -= (r * r > d)
        r += ((r + 1) * (r + 1) <= d)
        sq = r * r == d
        y, r = y[sq], r[sq]
        s = 3 * x * y
        for z2 in (s - r, s + r):
            even = z2 % 2 == 0
            z = z2 // 2
            good = even & (z >= y) & (z <= bound)
            for yy, zz in zip(y[good], z[good]):
                found.append((x, int(yy), int(zz)))
        x += 1
    found = sorted(set(found))
    return np.array(found, dtype=np.int64).reshape(-1, 3)


if HAVE_NUMBA:
    _scan_nb = numba.njit(cache=True)(_scan_py)


def markov_scan(bound: int, use_numba: bool | None = None) -> list[tuple[int, int, int]]:
    """All ordered Markov triples with max coordinate <= bound, by discriminant testing."""
    use_numba = HAVE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    if bound < 1:
        return []
    if bound > 3 * 10**8:
        raise ValueError("scan bound too large for 64-bit discriminants")
    if use_numba:
        out = np.zeros((4 * int(np.log2(bound + 2)) ** 2 + 64, 3), dtype=np.int64)
        n = _scan_nb(bound, out)
        if n > out.shape[0]:
            raise RuntimeError("scan buffer too small")
        arr = out[:n]
    else:
        arr = _scan_numpy(bound)
    return sorted({(int(a), int(b), int(c)) for a, b, c in arr}, key=lambda t: (t[2], t[1], t[0]))


# RK4 oracle for the axis fields ----------------------------------------------

def _field(p, A, B, C, E, axis, out):
    x, y, z = p[0], p[1], p[2]
    Nx = 2 * x + E * y * z - A
    Ny = 2 * y + E * x * z - B
    Nz = 2 * z + E * x * y - C
    if axis == 0:
        out[0] = 0
        out[1] = Nz
        out[2] = -Ny
    elif axis == 1:
        out[0] = -Nz
        out[1] = 0
        out[2] = Nx
    else:
        out[0] = Ny
        out[1] = -Nx
        out[2] = 0


def _rk4_py(params, axis, pts, ts, nsteps, out):
    A, B, C, E = params[0], params[1], params[2], params[4]
    k1 = np.zeros(3, dtype=np.complex128)
    k2 = np.zeros(3, dtype=np.complex128)
    k3 = np.zeros(3, dtype=np.complex128)
    k4 = np.zeros(3, dtype=np.complex128)
    tmp = np.zeros(3, dtype=np.complex128)
    for i in range(pts.shape[0]):
        p = pts[i].copy()
        h = ts[i] / nsteps
        for _ in range(nsteps):
            _field(p, A, B, C, E, axis, k1)
            for j in range(3):
                tmp[j] = p[j] + 0.5 * h * k1[j]
            _field(tmp, A, B, C, E, axis, k2)
            for j in range(3):
                tmp[j] = p[j] + 0.5 * h * k2[j]
            _field(tmp, A, B, C, E, axis, k3)
            for j in range(3):
                tmp[j] = p[j] + h * k3[j]
            _field(tmp, A, B, C, E, axis, k4)
            for j in range(3):
                p[j] = p[j] + h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j])
        out[i] = p


def _field_vec(P, A, B, C, E, axis):
    x, y, z = P[:, 0], P[:, 1], P[:, 2]
    Nx = 2 * x + E * y * z - A
    Ny = 2 * y + E * x * z - B
    Nz = 2 * z + E * x * y - C
    zero = np.zeros_like(x)
    cols = {0: (zero, Nz, -Ny), 1: (-Nz, zero, Nx), 2: (Ny, -Nx, zero)}[axis]
    return np.stack(cols, axis=1)


def _rk4_numpy(params, axis, pts, ts, nsteps):
    A, B, C, E = params[0], params[1], params[2], params[4]
    P = pts.copy()
    h = (ts / nsteps)[:, None]
    for _ in range(nsteps):
        k1 = _field_vec(P, A, B, C, E, axis)
        k2 = _field_vec(P + 0.5 * h * k1, A, B, C, E, axis)
        k3 = _field_vec(P + 0.5 * h * k2, A, B, C, E, axis)
        k4 = _field_vec(P + h * k3, A, B, C, E, axis)
        P = P + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return P


if HAVE_NUMBA:
    # rebinding lets the compiled integrator call the compiled field
    _field = numba.njit(cache=True)(_field)
    _rk4_nb = numba.njit(cache=True)(_rk4_py)


def rk4_axis_flow(params, axis: int, pts, ts, nsteps: int = 4000, use_numba: bool | None = None) -> np.ndarray:
    """Integrate dp/dt = V^axis(p) for each (point, time) pair in complex128."""
    use_numba = HAVE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    params = np.asarray(params, dtype=np.complex128)
    pts = np.atleast_2d(np.asarray(pts, dtype=np.complex128))
    ts = np.atleast_1d(np.asarray(ts, dtype=np.complex128))
    if use_numba:
        out = np.zeros_like(pts)
        _rk4_nb(params, int(axis), pts, ts, int(nsteps), out)
        return out
    return _rk4_numpy(params, int(axis), pts, ts, int(nsteps))


# multistart Newton on grad P = 0 ---------------------------------------------

def _newton_py(params, starts, iters, out):
    A, B, C, E = params[0], params[1], params[2], params[4]
    for i in range(starts.shape[0]):
        x, y, z = starts[i, 0], starts[i, 1], starts[i, 2]
        for _ in range(iters):
            f0 = 2 * x + E * y * z - A
            f1 = 2 * y + E * x * z - B
            f2 = 2 * z + E * x * y - C
            a, b, c = 2.0 + 0j, E * z, E * y
            d, e, f = E * z, 2.0 + 0j, E * x
            g, h, k = E * y, E * x, 2.0 + 0j
            det = a * (e * k - f * h) - b * (d * k - f * g) + c * (d * h - e * g)
            if abs(det) < 1e-300:
                break
            # Cramer's rule for H * delta = F
            dx = (f0 * (e * k - f * h) - b * (f1 * k - f * f2) + c * (f1 * h - e * f2)) / det
            dy = (a * (f1 * k - f * f2) - f0 * (d * k - f * g) + c * (d * f2 - f1 * g)) / det
            dz = (a * (e * f2 - f1 * h) - b * (d * f2 - f1 * g) + f0 * (d * h - e * g)) / det
            x -= dx
            y -= dy
            z -= dz
            if abs(dx) + abs(dy) + abs(dz) < 1e-15 * (1 + abs(x) + abs(y) + abs(z)):
                break
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = z


def _newton_numpy(params, starts, iters):
    A, B, C, E = params[0], params[1], params[2], params[4]
    P = starts.copy()
    for _ in range(iters):
        x, y, z = P[:, 0], P[:, 1], P[:, 2]
        F = np.stack([2 * x + E * y * z - A, 2 * y + E * x * z - B, 2 * z + E * x * y - C], axis=1)
        two = np.full_like(x, 2.0)
        H = np.stack([np.stack([two, E * z, E * y], axis=1),
                      np.stack([E * z, two, E * x], axis=1),
                      np.stack([E * y, E * x, two], axis=1)], axis=1)
        det = np.linalg.det(H)
        good = np.abs(det) > 1e-300
        delta = np.zeros_like(P)
        if good.any():
            delta[good] = np.linalg.solve(H[good], F[good][..., None])[..., 0]
        P = P - delta
    return P


if HAVE_NUMBA:
    _newton_nb = numba.njit(cache=True)(_newton_py)


def newton_critical_points(params, starts, iters: int = 60, use_numba: bool | None = None) -> np.ndarray:
    """Run Newton's method on grad P = 0 from every start point."""
    use_numba = HAVE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    params = np.asarray(params, dtype=np.complex128)
    starts = np.atleast_2d(np.asarray(starts, dtype=np.complex128))
    if use_numba:
        out = np.zeros_like(starts)
        _newton_nb(params, starts, int(iters), out)
        return out
    return _newton_numpy(params, starts, int(iters))
