"""Independent numeric oracles shared by several test modules."""
from fractions import Fraction
from itertools import product

import mpmath
import numpy as np


def mpf(q):
    if isinstance(q, mpmath.mpf):
        return q
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def numeric_orbit_dist2(M, drho, dtheta, group, box=2):
    """Squared quotient distance between orbits from float differences of
    log points: least-squares projection plus a brute-force lattice search."""
    M = np.array(M, dtype=float)
    n = M.shape[1]
    dr = np.array([float(a) for a in drho])
    dt = np.array([float(a) for a in dtheta])
    if group == "T":
        x, *_ = np.linalg.lstsq(M.T, dr, rcond=None)
        real2 = float(np.sum((dr - M.T @ x) ** 2))
    else:
        real2 = float(dr @ dr)
    best = None
    for z in product(range(-box, box + 1), repeat=n):
        r = dt - np.array(z)
        x, *_ = np.linalg.lstsq(M.T, r, rcond=None)
        v = float(np.sum((r - M.T @ x) ** 2))
        best = v if best is None else min(best, v)
    return real2 + 4 * np.pi ** 2 * best


def numeric_log_diff(v, w):
    """(rho_v - rho_w, theta_v - theta_w) in floats for Gaussian vectors."""
    lv = [np.log(complex(x)) for x in v]
    lw = [np.log(complex(x)) for x in w]
    return ([a.real - b.real for a, b in zip(lv, lw)],
            [(a.imag - b.imag) / (2 * np.pi) for a, b in zip(lv, lw)])


def sampled_k_orbit_dist(weights_row, v, w, samples=40001):
    """min over a grid of angles of ||e^{2 pi i phi w} v - w|| for d = 1,
    with the Lipschitz slack of the grid."""
    wts = np.array(weights_row, dtype=float)
    phis = np.linspace(0, 1, samples)
    vv = np.array([complex(x) for x in v])
    ww = np.array([complex(x) for x in w])
    rot = np.exp(2j * np.pi * np.outer(phis, wts)) * vv
    dists = np.sqrt(np.sum(np.abs(rot - ww) ** 2, axis=1))
    lip = 2 * np.pi * float(np.abs(wts).max()) * float(np.linalg.norm(vv)) / (samples - 1)
    return float(dists.min()), lip
