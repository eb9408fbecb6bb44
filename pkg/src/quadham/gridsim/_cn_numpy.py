"""Pure-numpy Crank-Nicolson stepping core (fallback backend)."""

import numpy as np
from scipy.linalg import solve_banded


def cn_run(psi, x, dx, dt, a_mid, b_mid, c_mid, d_mid):
    """Advance psi through len(a_mid) Crank-Nicolson steps of size dt.

    The generator is K = i a D2 - i b x^2 - c (x d/dx) - d with coefficients
    frozen at the step midpoints and Dirichlet boundaries.  The drift term
    uses the symmetrized form x d/dx = (x D1 + D1 x)/2 - 1/2 with centered
    D1, which keeps the discrete norm law exact up to O(dx^2).
    """
    psi = np.asarray(psi, dtype=np.complex128).copy()
    n = x.size
    x2 = x * x
    xp = np.empty(n)
    xm = np.empty(n)
    xp[:-1] = x[:-1] + x[1:]
    xp[-1] = 2.0 * x[-1]
    xm[1:] = x[1:] + x[:-1]
    xm[0] = 2.0 * x[0]
    ab = np.zeros((3, n), dtype=np.complex128)
    half = 0.5 * dt
    for k in range(len(a_mid)):
        a, b, c, d = a_mid[k], b_mid[k], c_mid[k], d_mid[k]
        off = 1j * a / (dx * dx)
        lower = off + c * xm / (4.0 * dx)
        upper = off - c * xp / (4.0 * dx)
        diag = -2.0 * off - 1j * b * x2 - d + 0.5 * c
        rhs = psi + half * diag * psi
        rhs[1:-1] += half * (lower[1:-1] * psi[:-2] + upper[1:-1] * psi[2:])
        rhs[0] = 0.0
        rhs[-1] = 0.0
        ab[0, 1:] = -half * upper[:-1]
        ab[1, :] = 1.0 - half * diag
        ab[2, :-1] = -half * lower[1:]
        ab[0, 1] = 0.0
        ab[2, -2] = 0.0
        ab[1, 0] = 1.0
        ab[1, -1] = 1.0
        psi = solve_banded((1, 1), ab, rhs)
    return psi
