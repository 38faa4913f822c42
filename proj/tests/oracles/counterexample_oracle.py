"""Independent oracle for the counterexample branch distances.

Integrates x' = x^2 - 1, y' = -x y + mu (x^2 - 1) from z2 + 1e-6 * v_u with
DOP853 at tight tolerance, resamples the branch and the reference set
A = {(x, 0): -1 <= x <= 1} u {-1} x [0, 2] at pitch 1e-3 and prints the
Hausdorff distances.
"""
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp
from scipy.spatial import cKDTree

WINDOW = (-1.1, 1.0, -0.1, 2.0)
PITCH = 1e-3
SEED_OFFSET = 1e-6


def rhs(mu):
    def f(_t, z):
        x, y = z
        return [x * x - 1.0, -x * y + mu * (x * x - 1.0)]
    return f


def leave_window(_t, z):
    x, y = z
    lo_x, hi_x, lo_y, hi_y = WINDOW
    return min(x - lo_x, hi_x - x, y - lo_y, hi_y - y)


leave_window.terminal = True
leave_window.direction = -1


def resample(poly, pitch):
    seg = np.diff(poly, axis=0)
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    s = np.concatenate([[0.0], np.cumsum(lengths)])
    total = s[-1]
    count = max(2, int(np.ceil(total / pitch)) + 1)
    grid = np.linspace(0.0, total, count)
    return np.column_stack([np.interp(grid, s, poly[:, 0]), np.interp(grid, s, poly[:, 1])])


def trace(mu):
    if mu == 0:
        xs = np.arange(-1.0 + PITCH, 1.0, PITCH)
        return np.column_stack([xs, np.zeros_like(xs)])
    v = np.array([-1.0, -2.0 * mu / 3.0])
    v /= np.linalg.norm(v)
    z0 = np.array([1.0, 0.0]) + SEED_OFFSET * v
    sol = solve_ivp(rhs(mu), (0.0, 200.0), z0, method="DOP853", rtol=1e-12, atol=1e-14,
                    events=leave_window, dense_output=True, max_step=0.01)
    t_end = sol.t[-1]
    ts = np.linspace(0.0, t_end, 200001)
    poly = sol.sol(ts).T
    inside = (poly[:, 0] >= WINDOW[0]) & (poly[:, 0] <= WINDOW[1]) & (poly[:, 1] >= WINDOW[2]) & (poly[:, 1] <= WINDOW[3])
    poly = poly[inside]
    return resample(poly, PITCH)


def a_set():
    n_h = int(round(2.0 / PITCH))
    xs = np.linspace(-1.0, 1.0, n_h + 1)
    horiz = np.column_stack([xs, np.zeros_like(xs)])
    n_v = int(round(2.0 / PITCH))
    ys = np.linspace(0.0, 2.0, n_v + 1)
    vert = np.column_stack([-np.ones_like(ys), ys])
    return np.vstack([horiz, vert])


def hausdorff(a, b):
    da, _ = cKDTree(b).query(a)
    db, _ = cKDTree(a).query(b)
    return max(da.max(), db.max())


if __name__ == "__main__":
    aset = a_set()
    for mu in [Fraction(-1, 5), Fraction(-1, 10), Fraction(-1, 20), Fraction(-1, 100), Fraction(0)]:
        tr = trace(float(mu))
        print(f"{str(mu):>7}  points={len(tr):6d}  end=({tr[-1,0]:+.6f},{tr[-1,1]:+.6f})  d={hausdorff(tr, aset):.9f}")
