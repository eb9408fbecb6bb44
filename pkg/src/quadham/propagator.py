"""Green-function evaluation and state propagation.

Gaussian states ``psi = exp(i(Lambda x^2 + Theta x + Phi))`` are closed
under propagation by a quadratic-exponent kernel; the update is a complex
Gaussian integral in closed form.  Grid states are propagated by direct
quadrature of the superposition integral.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .characteristic import MU_GUARD, KernelParameters
from .errors import (CausticEncountered, DegenerateWidth, NonNormalizable,
                     UnderResolved)

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GaussianState:
    """Wavefunction exp(i(Lambda x^2 + Theta x + Phi)).

    ``branch_phase`` is the accumulated argument of the square-root branch
    picked up during propagation; it is carried so that time sweeps can
    unwrap the phase continuously.
    """

    Lambda: complex
    Theta: complex = 0.0
    Phi: complex = 0.0
    branch_phase: float = 0.0

    def __post_init__(self):
        if not (self.Lambda.imag > 0):
            raise NonNormalizable("Im(Lambda) must be positive",
                                  Lambda=self.Lambda)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(1j * (self.Lambda * x ** 2 + self.Theta * x + self.Phi))

    def norm_sq(self) -> float:
        """Closed-form integral of |psi|^2."""
        li = self.Lambda.imag
        ti = self.Theta.imag
        return math.sqrt(math.pi / (2.0 * li)) * math.exp(
            ti * ti / (2.0 * li) - 2.0 * self.Phi.imag)

    def moments(self):
        """Raw (unnormalized) expectations of 1, x, x^2, p, p^2, px+xp."""
        n = self.norm_sq()
        li, ti = self.Lambda.imag, self.Theta.imag
        x_mean = -ti / (2.0 * li)
        x2_mean = x_mean * x_mean + 1.0 / (4.0 * li)
        p_mean = (2.0 * self.Lambda * x_mean + self.Theta).real
        p2_mean = (-2j * self.Lambda + 4.0 * self.Lambda ** 2 * x2_mean
                   + 4.0 * self.Lambda * self.Theta * x_mean
                   + self.Theta ** 2).real
        pxxp_mean = 2.0 * (2.0 * self.Lambda.real * x2_mean
                           + self.Theta.real * x_mean)
        return {"norm": n, "x": x_mean * n, "x2": x2_mean * n,
                "p": p_mean * n, "p2": p2_mean * n, "pxxp": pxxp_mean * n}


@dataclass(frozen=True)
class GridState:
    """Complex wavefunction samples on a uniform grid x0 + j dx."""

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.asarray(self.values, dtype=complex))
        if not (self.dx > 0):
            raise ValueError("dx must be positive")
        if self.values.size < 8:
            raise ValueError("grid must have at least 8 points")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.values.size)

    def norm_sq(self) -> float:
        return float(self.dx * np.sum(np.abs(self.values) ** 2))


def green_eval(kp: KernelParameters, x, y) -> complex:
    """(2 pi i mu)^(-1/2) exp(i(alpha x^2 + beta x y + gamma y^2)),
    principal branch."""
    if abs(kp.mu) < MU_GUARD:
        raise CausticEncountered("mu is inside the caustic guard band",
                                 t=kp.t)
    pref = 1.0 / cmath.sqrt(_TWO_PI * 1j * kp.mu)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    val = pref * np.exp(1j * (kp.alpha * x ** 2 + kp.beta * x * y
                              + kp.gamma * y ** 2))
    return complex(val) if val.ndim == 0 else val


def propagate_gaussian(kp: KernelParameters, s: GaussianState) -> GaussianState:
    """Closed-form propagation of a Gaussian state by the kernel at kp.t.

    The square-root branch is chosen nearest to the state's accumulated
    branch_phase, so sweeping t with the output fed back keeps the phase
    continuous across principal-branch cuts.
    """
    A = kp.gamma + s.Lambda
    if abs(A) < 1e-12:
        raise DegenerateWidth("gamma + Lambda is (nearly) zero", t=kp.t)
    Lambda_out = kp.alpha - kp.beta ** 2 / (4.0 * A)
    Theta_out = -kp.beta * s.Theta / (2.0 * A)
    # prefactor 1/sqrt(2 pi i mu) folded with the Gaussian integral
    # sqrt(pi / (-i A)) leaves an overall (2 mu A)^(-1/2)
    w = 2.0 * kp.mu * A
    arg = cmath.phase(w)
    k = round((s.branch_phase - arg) / _TWO_PI)
    arg += _TWO_PI * k
    log_w = complex(math.log(abs(w)), arg)
    Phi_out = s.Phi - s.Theta ** 2 / (4.0 * A) + 0.5j * log_w
    if not (Lambda_out.imag > 0):
        raise NonNormalizable("propagated state is not normalizable",
                              t=kp.t, Lambda=Lambda_out)
    return GaussianState(Lambda_out, Theta_out, Phi_out, branch_phase=arg)


def gaussian_sweep(kernel_of, times, s0: GaussianState):
    """Propagate the same initial state to each time in ``times`` with a
    continuously tracked branch; ``kernel_of`` maps t to KernelParameters."""
    out = []
    carry = s0
    for t in times:
        kp = kernel_of(t)
        # feed the previous branch phase through a fresh copy of s0
        seed = GaussianState(s0.Lambda, s0.Theta, s0.Phi,
                             branch_phase=carry.branch_phase)
        carry = propagate_gaussian(kp, seed)
        out.append(carry)
    return out


def propagate_grid(kp: KernelParameters, phi: GridState,
                   target_grid=None) -> GridState:
    """Trapezoid quadrature of psi(x) = int G(x, y) phi(y) dy."""
    if target_grid is None:
        x0, dx, n = phi.x0, phi.dx, phi.values.size
    else:
        x0, dx, n = target_grid
    peak = float(np.max(np.abs(phi.values)))
    if peak == 0.0:
        return GridState(x0, dx, np.zeros(n, dtype=complex))
    edge = max(abs(phi.values[0]), abs(phi.values[-1]))
    if edge > 1e-10 * peak:
        raise UnderResolved("source state does not decay at the grid ends",
                            edge_fraction=float(edge / peak))

    y = phi.x
    x = x0 + dx * np.arange(n)
    # quadrature resolution guard: phase advance per source step
    max_phase = abs(kp.beta) * phi.dx * float(np.max(np.abs(x)))
    if max_phase > 0.25 * math.pi:
        raise UnderResolved("kernel phase advances too fast per source step",
                            phase_per_step=max_phase)

    weights = np.full(y.size, phi.dx)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    pref = 1.0 / cmath.sqrt(_TWO_PI * 1j * kp.mu)
    kernel = np.exp(1j * (kp.alpha * x[:, None] ** 2
                          + kp.beta * np.outer(x, y)
                          + kp.gamma * y[None, :] ** 2))
    values = pref * kernel @ (weights * phi.values)
    return GridState(x0, dx, values)


def schrodinger_residual(tc, kernel_of, x: float, y: float, t: float,
                         fd_step: float = 1e-3) -> float:
    """Finite-difference residual of the evolution equation at (x, y, t).

    ``tc`` must be "equation"-convention coefficients and ``kernel_of`` a
    map from time to KernelParameters.  Central differences with step
    ``fd_step`` are used in both t and x; the result is |i G_t + a G_xx
    - b x^2 G + i c x G_x + i d G| / |G|.
    """
    from .coefficients import EQUATION

    tc.require(EQUATION)
    h = fd_step

    def G(tt, xx):
        return green_eval(kernel_of(tt), xx, y)

    g0 = G(t, x)
    gt = (G(t + h, x) - G(t - h, x)) / (2.0 * h)
    gxp, gxm = G(t, x + h), G(t, x - h)
    gxx = (gxp - 2.0 * g0 + gxm) / (h * h)
    gx = (gxp - gxm) / (2.0 * h)
    res = (1j * gt + tc.a(t) * gxx - tc.b(t) * x * x * g0
           + 1j * tc.c(t) * x * gx + 1j * tc.d(t) * g0)
    return abs(res) / abs(g0)
