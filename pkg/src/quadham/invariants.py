"""Quadratic and linear dynamical invariants.

Covers the per-model catalog of conserved quadratic operators, the
Lewis-Riesenfeld construction from the nonlinear kappa equation, the
Pinney-type superposition of linear solutions, the general symmetric-form
invariant for arbitrary (possibly non-self-adjoint) quadratic Hamiltonians,
linear invariants, and the ladder factorization of a quadratic invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad, solve_ivp

from . import coefficients as coeff
from .coefficients import HAMILTONIAN, ModelSpec, TimeCoefficients, \
    cj_scaled_coefficients
from .errors import (AuxiliaryResidualTooLarge, ConstraintViolated, InvalidC0,
                     KappaCollapse, MuVanishes, NoClosedForm, NonPositiveForm,
                     ResidualTooLarge, ToleranceNotMet)

_QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class QuadraticForm:
    """Coefficients of A p^2 + B x^2 + C px + D xp at time t."""

    A: float
    B: float
    C: float
    D: float
    t: float = 0.0

    def expectation(self, p2: float, x2: float, pxxp: float,
                    norm: float = 1.0) -> float:
        """Contract with raw second moments; <px> - <xp> = -i <1> exactly,
        so the antisymmetric part contributes (C - D)/2 * <1> * (-i) with a
        compensating +i, i.e. nothing for the real forms used here unless
        C != D, in which case the real contribution is still through pxxp."""
        return (self.A * p2 + self.B * x2 + 0.5 * (self.C + self.D) * pxxp)


@dataclass(frozen=True)
class LinearForm:
    """Coefficients of A p + B x + C (constant term) at time t."""

    A: float
    B: float
    C: float
    t: float = 0.0


@dataclass(frozen=True)
class LadderPair:
    """Annihilation/creation pair a = P x + R d/dx, a^dagger = conj(P) x - R d/dx."""

    x_coeff: complex
    ddx_coeff: float
    omega_t: float
    t: float = 0.0

    def commutator(self) -> float:
        return 2.0 * self.x_coeff.real * self.ddx_coeff

    def reconstruct(self) -> QuadraticForm:
        """(omega/2)(a a^dagger + a^dagger a) expanded as a quadratic form."""
        P, R, w = self.x_coeff, self.ddx_coeff, self.omega_t
        return QuadraticForm(A=w * R * R, B=w * abs(P) ** 2,
                             C=w * P.imag * R, D=w * P.imag * R, t=self.t)


@dataclass(frozen=True)
class ErmakovSolution:
    """A positive solution of kappa'' + omega^2(t) kappa = C0 / kappa^3."""

    kappa: Callable[[float], float]
    kappa_prime: Callable[[float], float]
    C0: float
    variable: str = "physical"
    window: tuple = (0.0, math.inf)


def solve_energy_system(tc: TimeCoefficients, init, t_end: float,
                        tol: float = 1e-10):
    """Integrate the conservation conditions for a quadratic form
    A p^2 + B x^2 + C px + D xp under H = a p^2 + b x^2 + c px + d xp:

        A' + 2a(C + D) - (3c + d) A = 0,
        B' - 2b(C + D) + (c + 3d) B = 0,
        C' + 2(a B - b A) - (c - d) C = 0,
        D' + 2(a B - b A) - (c - d) D = 0.

    For self-adjoint data (c = d, C = D) this reduces to the familiar
    three-component system.  ``init`` is (A0, B0, C0) with D0 = C0, or
    (A0, B0, C0, D0).  Returns a callable t -> QuadraticForm.
    """
    tc.require(HAMILTONIAN)
    y0 = list(init)
    if len(y0) == 3:
        y0.append(y0[2])

    def rhs(t, y):
        A, B, C, D = y
        a, b = tc.a(t), tc.b(t)
        c, d = tc.c(t), tc.d(t)
        cross = 2.0 * (a * B - b * A)
        return [-2.0 * a * (C + D) + (3.0 * c + d) * A,
                2.0 * b * (C + D) - (c + 3.0 * d) * B,
                -cross + (c - d) * C,
                -cross + (c - d) * D]

    sol = solve_ivp(rhs, (0.0, t_end), y0, method="RK45",
                    rtol=tol, atol=tol * 1e-2, dense_output=True)
    if not sol.success:
        raise ToleranceNotMet(sol.message)

    def path(t: float) -> QuadraticForm:
        A, B, C, D = sol.sol(t)
        return QuadraticForm(A=float(A), B=float(B), C=float(C), D=float(D), t=t)

    return path


def energy_operator_catalog(spec: ModelSpec, t: float) -> QuadraticForm:
    """Closed-form conserved quadratic operator for a built-in model.

    For the hyperbolically damped models the entry is conserved under the
    frequency-rescaled Hamiltonian (see ``cj_scaled_coefficients``), with
    the momentum representation obtained by swapping A and B and negating
    the cross term.
    """
    spec.validate()
    w0, lam, mu_p, dlt = spec.omega0, spec.lam, spec.mu_param, spec.delta
    w = spec.omega
    m = spec.model_id

    if m == coeff.CALDIROLA_KANAI:
        return QuadraticForm(0.5 * w0 * math.exp(-2 * lam * t),
                             0.5 * w0 * math.exp(2 * lam * t),
                             0.5 * lam, 0.5 * lam, t)
    if m == coeff.MODIFIED_CK:
        return QuadraticForm(0.5 * w0 * math.exp(-2 * lam * t),
                             0.5 * w0 * math.exp(2 * lam * t),
                             -0.5 * lam, -0.5 * lam, t)
    if m == coeff.MODIFIED_OSCILLATOR:
        c2, s2 = math.cos(2 * t), math.sin(2 * t)
        return QuadraticForm(0.5 * c2, -0.5 * c2, 0.5 * s2, 0.5 * s2, t)
    if m == coeff.MODIFIED_PARAMETRIC:
        u = lam * t + dlt
        return QuadraticForm(math.tanh(u) ** 2, 1.0 / math.tanh(u) ** 2,
                             0.0, 0.0, t)
    if m == coeff.UNITED:
        e = math.exp(mu_p * t)
        return QuadraticForm(0.5 * w0 * e * math.exp(-2 * lam * t),
                             0.5 * w0 * e * math.exp(2 * lam * t),
                             0.5 * (lam - mu_p) * e,
                             0.5 * (lam - mu_p) * e, t)
    if m in (coeff.CJ_COORDINATE, coeff.CJ_MOMENTUM):
        ch = math.cosh(lam * t)
        A = 0.5 * w0 / ch ** 2
        B = (w0 ** 2 * math.sinh(lam * t) ** 2 + w ** 2) / (2.0 * w0)
        C = 0.5 * lam * math.tanh(lam * t)
        if m == coeff.CJ_MOMENTUM:
            A, B, C = B, A, -C
        return QuadraticForm(A, B, C, C, t)
    if m == coeff.PARAMETRIC_SECH2:
        th = math.tanh(lam * t)
        ch = math.cosh(lam * t)
        A = w ** 2 + lam ** 2 * th ** 2
        B = (lam ** 6 * math.sinh(lam * t) ** 2
             + w ** 2 * (lam ** 2 + w ** 2) ** 2 * ch ** 6) / (ch ** 6 * A)
        # the cross term is -kappa kappa'; the printed plus sign does not
        # conserve the expectation value
        C = -lam ** 3 * math.sinh(lam * t) / ch ** 3
        return QuadraticForm(A, B, C, C, t)
    if m == coeff.SIMPLE_HARMONIC:
        return QuadraticForm(0.5 * w0, 0.5 * w0, 0.0, 0.0, t)
    if m == coeff.FREE_PARTICLE:
        return QuadraticForm(0.5, 0.0, 0.0, 0.0, t)
    raise NoClosedForm(f"no catalogued invariant for {m!r}")


def catalog_coefficients(spec: ModelSpec) -> TimeCoefficients:
    """Hamiltonian under which the catalogued invariant is conserved."""
    if spec.model_id in (coeff.CJ_COORDINATE, coeff.CJ_MOMENTUM):
        return cj_scaled_coefficients(spec)
    return coeff.builtin_coefficients(spec, HAMILTONIAN)


def solve_ermakov(omega_sq: Callable[[float], float], c0: float, init,
                  t_end: float, tol: float = 1e-10) -> ErmakovSolution:
    """Integrate kappa'' + omega^2(t) kappa = c0 / kappa^3 from (kappa0, kappa0')."""
    kappa0, kappa0p = init
    if not (kappa0 > 0):
        raise ValueError("kappa(0) must be positive")

    def rhs(t, y):
        return [y[1], c0 / y[0] ** 3 - omega_sq(t) * y[0]]

    def collapse(t, y):
        return y[0] - 1e-8

    collapse.terminal = True
    collapse.direction = -1

    sol = solve_ivp(rhs, (0.0, t_end), [kappa0, kappa0p], method="RK45",
                    rtol=tol, atol=tol * 1e-2, dense_output=True,
                    events=collapse)
    if sol.status == 1:
        raise KappaCollapse("kappa reached the collapse guard",
                            t=float(sol.t_events[0][0]))
    if not sol.success:
        raise ToleranceNotMet(sol.message)
    t_hi = float(sol.t[-1])
    return ErmakovSolution(kappa=lambda t: float(sol.sol(t)[0]),
                           kappa_prime=lambda t: float(sol.sol(t)[1]),
                           C0=c0, variable="physical", window=(0.0, t_hi))


def pinney_superpose(u, v, A: float, B: float, C: float, W: float,
                     c0: Optional[float] = None,
                     window=(0.0, math.inf)) -> ErmakovSolution:
    """kappa = sqrt(A u^2 + 2 B u v + C v^2) from two linear solutions.

    ``u`` and ``v`` map t to (value, derivative) of independent solutions of
    the same equation u'' + omega^2(t) u = 0 with constant Wronskian W.
    The constants must satisfy A C - B^2 = c0 / W^2.
    """
    implied = (A * C - B * B) * W * W
    if c0 is None:
        c0 = implied
    elif abs(implied - c0) > 1e-10 * max(1.0, abs(c0)):
        raise ConstraintViolated(
            "A C - B^2 is inconsistent with c0 / W^2",
            implied_c0=implied, c0=c0)

    def form(t):
        u0, u1 = u(t)[:2]
        v0, v1 = v(t)[:2]
        q = A * u0 * u0 + 2.0 * B * u0 * v0 + C * v0 * v0
        dq = 2.0 * (A * u0 * u1 + B * (u1 * v0 + u0 * v1) + C * v0 * v1)
        return q, dq

    def kappa(t):
        q, _ = form(t)
        if q <= 0.0:
            raise NonPositiveForm("quadratic form is not positive", t=t)
        return math.sqrt(q)

    def kappa_prime(t):
        q, dq = form(t)
        if q <= 0.0:
            raise NonPositiveForm("quadratic form is not positive", t=t)
        return 0.5 * dq / math.sqrt(q)

    return ErmakovSolution(kappa=kappa, kappa_prime=kappa_prime, C0=c0,
                           variable="physical", window=window)


def lewis_riesenfeld_invariant(sol: ErmakovSolution, t: float) -> QuadraticForm:
    """(kappa p - kappa' x)^2 + c0 x^2 / kappa^2 expanded as a quadratic form."""
    k = sol.kappa(t)
    kp = sol.kappa_prime(t)
    return QuadraticForm(A=k * k, B=kp * kp + sol.C0 / (k * k),
                         C=-k * kp, D=-k * kp, t=t)


def _cd_integral(tc: TimeCoefficients, t: float, sign: int = 1) -> float:
    """int_0^t (c - d) ds (sign=+1) or int_0^t (c + d) ds (sign=-1 flips d)."""
    if t == 0.0:
        return 0.0
    val, _ = quad(lambda s: tc.c(s) - sign * tc.d(s), 0.0, t,
                  epsabs=0.0, epsrel=_QUAD_RTOL, limit=200)
    return val


def _mu_triplet(mu_fn, t: float):
    """(mu, mu', mu'') from a callable returning two or three derivatives."""
    vals = mu_fn(t)
    if len(vals) >= 3:
        return vals[0], vals[1], vals[2]
    h = max(1e-5, 1e-7 * abs(t))
    mupp = (mu_fn(t + h)[1] - mu_fn(t - h)[1]) / (2.0 * h)
    return vals[0], vals[1], mupp


def auxiliary_residual(tc: TimeCoefficients, mu_fn, C0: float,
                       t: float) -> float:
    """Absolute residual of the nonlinear auxiliary equation

        mu'' - (a'/a) mu' + (4ab + (a'/a - c - d)(c + d) - c' - d') mu
            = C0 (2a)^2 / mu^3.
    """
    tc.require(HAMILTONIAN)
    mu, mup, mupp = _mu_triplet(mu_fn, t)
    if mu == 0.0 and C0 != 0.0:
        raise MuVanishes("mu vanishes with C0 != 0", t=t)
    a, b = tc.a(t), tc.b(t)
    c, d = tc.c(t), tc.d(t)
    ap = tc.deriv_a(t)
    cp, dp = tc.deriv_c(t), tc.deriv_d(t)
    lhs = (mupp - (ap / a) * mup
           + (4.0 * a * b + (ap / a - c - d) * (c + d) - cp - dp) * mu)
    rhs = C0 * (2.0 * a) ** 2 / mu ** 3 if C0 != 0.0 else 0.0
    return abs(lhs - rhs)


def superpose_linear_solutions(tc: TimeCoefficients, u, v,
                               A: float, B: float, C: float):
    """Combine two solutions of the linear auxiliary equation into a solution
    of the nonlinear one: mu = sqrt(A u^2 + 2 B u v + C v^2).

    ``u`` and ``v`` map t to (value, derivative).  Their Wronskian equals
    const * 2a(t); the combined solution has C0 = (A C - B^2) W^2 / (2a)^2,
    a constant.  Returns (mu_fn, C0) with mu_fn yielding (mu, mu', mu'').
    """
    tc.require(HAMILTONIAN)
    u0, u1 = u(0.0)[:2]
    v0, v1 = v(0.0)[:2]
    W0 = u0 * v1 - u1 * v0
    a0 = tc.a(0.0)
    C0 = (A * C - B * B) * W0 * W0 / (2.0 * a0) ** 2

    def q_coeff(t):
        a, b = tc.a(t), tc.b(t)
        c, d = tc.c(t), tc.d(t)
        ap = tc.deriv_a(t)
        cp, dp = tc.deriv_c(t), tc.deriv_d(t)
        return ap / a, 4.0 * a * b + (ap / a - c - d) * (c + d) - cp - dp

    def mu_fn(t):
        uu = u(t)[:2]
        vv = v(t)[:2]
        p, q = q_coeff(t)
        # second derivatives of u, v from the linear equation itself
        u2 = p * uu[1] - q * uu[0]
        v2 = p * vv[1] - q * vv[0]
        s = A * uu[0] ** 2 + 2.0 * B * uu[0] * vv[0] + C * vv[0] ** 2
        if s <= 0.0:
            raise NonPositiveForm("quadratic form is not positive", t=t)
        ds = 2.0 * (A * uu[0] * uu[1] + B * (uu[1] * vv[0] + uu[0] * vv[1])
                    + C * vv[0] * vv[1])
        d2s = 2.0 * (A * (uu[1] ** 2 + uu[0] * u2)
                     + B * (u2 * vv[0] + 2.0 * uu[1] * vv[1] + uu[0] * v2)
                     + C * (vv[1] ** 2 + vv[0] * v2))
        mu = math.sqrt(s)
        mup = 0.5 * ds / mu
        mupp = 0.5 * d2s / mu - mup * mup / mu
        return mu, mup, mupp

    return mu_fn, C0


def solve_linear_auxiliary(tc: TimeCoefficients, init, t_end: float,
                           tol: float = 1e-12):
    """Integrate the linear auxiliary equation mu'' = (a'/a) mu' - Q mu and
    return a callable t -> (mu, mu')."""
    tc.require(HAMILTONIAN)

    def rhs(t, y):
        a = tc.a(t)
        ap = tc.deriv_a(t)
        c, d = tc.c(t), tc.d(t)
        cp, dp = tc.deriv_c(t), tc.deriv_d(t)
        Q = 4.0 * a * tc.b(t) + (ap / a - c - d) * (c + d) - cp - dp
        return [y[1], (ap / a) * y[1] - Q * y[0]]

    sol = solve_ivp(rhs, (0.0, t_end), list(init), method="RK45",
                    rtol=tol, atol=tol * 1e-2, dense_output=True)
    if not sol.success:
        raise ToleranceNotMet(sol.message)
    return lambda t: (float(sol.sol(t)[0]), float(sol.sol(t)[1]))


def general_invariant(tc: TimeCoefficients, mu_fn, C0: float,
                      t: float, residual_tol: float = 1e-8) -> QuadraticForm:
    """Symmetric-form invariant for a general quadratic Hamiltonian:

        E = [(mu p - q x)^2 + C0 x^2 / mu^2] exp(int_0^t (c - d)),
        q = (mu' - (c + d) mu) / (2a),

    where mu solves the nonlinear auxiliary equation.
    """
    tc.require(HAMILTONIAN)
    res = auxiliary_residual(tc, mu_fn, C0, t)
    if res > residual_tol:
        raise AuxiliaryResidualTooLarge(
            "mu does not solve the auxiliary equation at t",
            residual=res, t=t)
    mu, mup = mu_fn(t)[:2]
    if mu == 0.0:
        raise MuVanishes("mu vanishes", t=t)
    a = tc.a(t)
    q = (mup - (tc.c(t) + tc.d(t)) * mu) / (2.0 * a)
    wfac = math.exp(_cd_integral(tc, t))
    return QuadraticForm(A=mu * mu * wfac,
                         B=(q * q + C0 / (mu * mu)) * wfac,
                         C=-mu * q * wfac, D=-mu * q * wfac, t=t)


def invariant_diagnostics(tc: TimeCoefficients, mu_fn, t: float) -> dict:
    """Auxiliary quantities of the invariant construction: the substituted
    kappa, the integrating factors, the proper time, and the key factor."""
    tc.require(HAMILTONIAN)
    mu, mup = mu_fn(t)[:2]
    int_cpd = _cd_integral(tc, t, sign=-1)
    int_3cd, _ = quad(lambda s: 3.0 * tc.c(s) + tc.d(s), 0.0, t,
                      epsabs=0.0, epsrel=_QUAD_RTOL, limit=200)
    int_c3d, _ = quad(lambda s: tc.c(s) + 3.0 * tc.d(s), 0.0, t,
                      epsabs=0.0, epsrel=_QUAD_RTOL, limit=200)
    mu1 = math.exp(-int_3cd)
    mu2 = math.exp(int_c3d)
    proper, _ = quad(lambda s: 2.0 * tc.a(s) * math.exp(
        -0.5 * (quad(lambda r: 3.0 * tc.c(r) + tc.d(r), 0.0, s,
                     epsabs=0.0, epsrel=1e-8, limit=100)[0]
                + quad(lambda r: tc.c(r) + 3.0 * tc.d(r), 0.0, s,
                       epsabs=0.0, epsrel=1e-8, limit=100)[0])),
        0.0, t, epsabs=0.0, epsrel=1e-8, limit=100)
    kappa = mu * math.exp(-int_cpd)
    key = math.exp(2.0 * int_cpd) / (2.0 * tc.a(t))
    return {"kappa": kappa, "mu1": mu1, "mu2": mu2,
            "proper_time": proper, "key": key}


def linear_invariant(tc: TimeCoefficients, A_fn, C0_const: float,
                     t: float, residual_tol: float = 1e-8) -> LinearForm:
    """Linear invariant P = A p + ((2c A - A') / 2a) x + C0 exp(int (c - d)).

    ``A_fn`` maps t to (A, A') (optionally (A, A', A'')) and must solve

        A'' - (a'/a + 2c - 2d) A' + 4(a b - c d + c a'/(2a) - c'/2) A = 0.
    """
    tc.require(HAMILTONIAN)
    A0, A1, A2 = _mu_triplet(A_fn, t)
    a, b = tc.a(t), tc.b(t)
    c, d = tc.c(t), tc.d(t)
    ap, cp = tc.deriv_a(t), tc.deriv_c(t)
    res = abs(A2 - (ap / a + 2.0 * c - 2.0 * d) * A1
              + 4.0 * (a * b - c * d + c * ap / (2.0 * a) - 0.5 * cp) * A0)
    if res > residual_tol:
        raise ResidualTooLarge("A does not solve the linear-invariant equation",
                               residual=res, t=t)
    B = (2.0 * c * A0 - A1) / (2.0 * a)
    Cterm = C0_const * math.exp(_cd_integral(tc, t))
    return LinearForm(A=A0, B=B, C=Cterm, t=t)


def ladder_factorization(tc: TimeCoefficients, mu_fn, C0: float,
                         t: float) -> LadderPair:
    """Time-dependent annihilation/creation pair factorizing the invariant as
    (omega(t)/2)(a a^dagger + a^dagger a) with omega(t) = 2 sqrt(C0)
    exp(int (c - d))."""
    tc.require(HAMILTONIAN)
    if not (C0 > 0):
        raise InvalidC0("C0 must be positive for the factorization", C0=C0)
    mu, mup = mu_fn(t)[:2]
    if mu == 0.0:
        raise MuVanishes("mu vanishes", t=t)
    a = tc.a(t)
    w0 = 2.0 * math.sqrt(C0)
    q = (mup - (tc.c(t) + tc.d(t)) * mu) / (2.0 * a)
    P = complex(math.sqrt(w0) / (2.0 * mu), -q / math.sqrt(w0))
    R = mu / math.sqrt(w0)
    omega_t = w0 * math.exp(_cd_integral(tc, t))
    return LadderPair(x_coeff=P, ddx_coeff=R, omega_t=omega_t, t=t)


def united_invariant_mu(spec: ModelSpec):
    """The elementary auxiliary-equation solution for the united model,
    mu = sqrt(omega0/2) e^{(mu_param - lambda) t} up to the kappa
    substitution; returns (mu_fn, C0) ready for general_invariant."""
    spec.validate()
    if spec.model_id != coeff.UNITED:
        raise NoClosedForm("elementary invariant mu catalogued only for the "
                           "united model")
    w0, lam = spec.omega0, spec.lam
    rate = -lam
    amp = math.sqrt(0.5 * w0)

    def mu_fn(t):
        e = amp * math.exp(rate * t)
        return e, rate * e, rate * rate * e

    C0 = 0.25 * spec.omega ** 2
    return mu_fn, C0
