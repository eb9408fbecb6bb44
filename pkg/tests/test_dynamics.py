import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadham import coefficients as coeff
from quadham import dynamics as dyn
from quadham import invariants as inv
from quadham.errors import InvalidMoments, NoClosedForm

M0 = dyn.SecondMoments(p2=0.8, x2=0.7, pxxp=0.1, norm=1.0)
M0_EVEN = dyn.SecondMoments(p2=0.8, x2=0.7, pxxp=0.0, norm=1.0)

CLOSED_FORM_SPECS = [
    coeff.ModelSpec(coeff.CALDIROLA_KANAI, 1.0, 0.1),
    coeff.ModelSpec(coeff.MODIFIED_CK, 1.0, 0.1),
    coeff.ModelSpec(coeff.UNITED, 1.0, 0.3, 0.1),
    coeff.ModelSpec(coeff.MODIFIED_OSCILLATOR),
]


def _tc_for(spec):
    return inv.catalog_coefficients(spec)


@pytest.mark.parametrize("spec", CLOSED_FORM_SPECS, ids=lambda s: s.model_id)
def test_closed_form_expectation_vs_moment_ode(spec):
    tc = _tc_for(spec)
    path = dyn.evolve_second_moments(tc, M0, 3.0)
    for t in np.linspace(0.2, 3.0, 11):
        m = path(float(t))
        A, B, C = dyn.reference_operator(spec, float(t))
        got = A * m.p2 + B * m.x2 + 0.5 * C * m.pxxp
        ref = dyn.closed_form_expectation(spec, M0, float(t))
        assert abs(got - ref) <= 1e-8 * max(1.0, abs(ref))


def test_cj_closed_form_vs_moment_ode():
    spec = coeff.ModelSpec(coeff.CJ_COORDINATE, 1.0, 0.2)
    tc = _tc_for(spec)
    path = dyn.evolve_second_moments(tc, M0_EVEN, 5.0)
    for t in np.linspace(0.2, 5.0, 13):
        m = path(float(t))
        A, B, C = dyn.reference_operator(spec, float(t))
        got = A * m.p2 + B * m.x2 + 0.5 * C * m.pxxp
        ref = dyn.closed_form_expectation(spec, M0_EVEN, float(t))
        assert abs(got - ref) <= 1e-6 * max(1.0, abs(ref))


def test_cj_closed_form_requires_even_branch():
    spec = coeff.ModelSpec(coeff.CJ_COORDINATE, 1.0, 0.2)
    with pytest.raises(InvalidMoments):
        dyn.closed_form_expectation(spec, M0, 0.5)


def test_cj_energy_equation_vs_closed_form():
    spec = coeff.ModelSpec(coeff.CJ_COORDINATE, 1.0, 0.2)
    y = dyn.damped_energy_equation_solve(spec, M0_EVEN, 5.0)
    for t in np.concatenate(([0.01, 0.05], np.linspace(0.2, 5.0, 25))):
        ref = dyn.closed_form_expectation(spec, M0_EVEN, float(t))
        assert abs(y(float(t)) - ref) <= 1e-6 * max(1.0, abs(ref))


def test_energy_equation_only_for_damped_model():
    with pytest.raises(NoClosedForm):
        dyn.damped_energy_equation_solve(
            coeff.ModelSpec(coeff.SIMPLE_HARMONIC, 1.0), M0_EVEN, 1.0)


@pytest.mark.parametrize("spec", [
    coeff.ModelSpec(coeff.UNITED, 1.0, 0.3, 0.1),
    coeff.ModelSpec(coeff.CJ_COORDINATE, 1.0, 0.2),
], ids=lambda s: s.model_id)
def test_mean_position_closed_form_vs_ode(spec):
    tc = coeff.builtin_coefficients(spec, coeff.HAMILTONIAN)
    amp, phase = 0.9, 0.4
    fm0 = dyn.mean_position_initial_conditions(spec, amp, phase)
    path = dyn.evolve_first_moments(tc, fm0, 4.0)
    for t in np.linspace(0.0, 4.0, 17):
        ref = dyn.closed_form_mean_position(spec, amp, phase, float(t))
        assert abs(path(float(t)).x - ref) <= 1e-8


def test_norm_rate_matches_drift_asymmetry():
    spec = coeff.ModelSpec(coeff.UNITED, 1.0, 0.3, 0.1)
    tc = coeff.builtin_coefficients(spec, coeff.HAMILTONIAN)
    d = dyn.moment_derivative(tc, M0, 0.7)
    assert d.norm == pytest.approx(
        (tc.d(0.7) - tc.c(0.7)) * M0.norm, rel=1e-14)
    # and the integrated norm decays exponentially at that rate
    path = dyn.evolve_second_moments(tc, M0, 2.0)
    assert path(2.0).norm == pytest.approx(math.exp(-0.1 * 2.0), rel=1e-10)


def test_uncertainty_coherent_initial_data():
    m = dyn.SecondMoments(p2=0.54, x2=0.51, pxxp=0.04, norm=1.0)
    fm = dyn.FirstMoments(x=0.1, p=0.2)
    out = dyn.uncertainty_check(m, fm)
    assert abs(out["margin"]) <= 1e-12
    assert out["product"] == pytest.approx(0.5, abs=1e-12)


def test_uncertainty_margin_stays_nonnegative_along_flow():
    spec = coeff.ModelSpec(coeff.CALDIROLA_KANAI, 1.0, 0.1)
    tc = coeff.builtin_coefficients(spec, coeff.HAMILTONIAN)
    m0 = dyn.SecondMoments(p2=0.54, x2=0.51, pxxp=0.04, norm=1.0)
    fm0 = dyn.FirstMoments(x=0.1, p=0.2)
    mp = dyn.evolve_second_moments(tc, m0, 3.0)
    fp = dyn.evolve_first_moments(tc, fm0, 3.0)
    for t in np.linspace(0.0, 3.0, 13):
        out = dyn.uncertainty_check(mp(float(t)), fp(float(t)))
        assert out["margin"] >= -1e-10


def test_uncertainty_rejects_nonpositive_norm():
    with pytest.raises(InvalidMoments):
        dyn.uncertainty_check(
            dyn.SecondMoments(p2=1.0, x2=1.0, norm=0.0),
            dyn.FirstMoments(0.0, 0.0))


def test_uncertainty_rejects_negative_variance():
    with pytest.raises(InvalidMoments):
        dyn.uncertainty_check(
            dyn.SecondMoments(p2=0.1, x2=1.0, norm=1.0),
            dyn.FirstMoments(0.0, 1.0))


@settings(max_examples=30, deadline=None)
@given(dp=st.floats(0.5, 2.0), dx=st.floats(0.5, 2.0),
       xm=st.floats(-1.0, 1.0), pm=st.floats(-1.0, 1.0),
       r=st.floats(-0.8, 0.8))
def test_uncertainty_margin_sign_property(dp, dx, xm, pm, r):
    # build raw moments from centered variances scaled to the admissible
    # region, then check the margin formula reproduces the construction
    cov = r * math.sqrt(dp * dx)
    dp2 = dp + 0.25 / dx + cov * cov / dx
    m = dyn.SecondMoments(p2=dp2 + pm * pm,
                          x2=dx + xm * xm,
                          pxxp=2.0 * (cov + xm * pm), norm=1.0)
    fm = dyn.FirstMoments(x=xm, p=pm)
    out = dyn.uncertainty_check(m, fm)
    assert out["margin"] >= -1e-12
    assert out["dp2"] == pytest.approx(dp2, rel=1e-10)
    assert out["dx2"] == pytest.approx(dx, rel=1e-10)


BASES = [dyn.HyperbolicBasis(lam=0.2, omega=1.0),
         dyn.HyperbolicBasis(lam=0.35, omega=1.4, gamma=0.3)]


@pytest.mark.parametrize("basis", BASES, ids=["plain", "shifted"])
def test_hyperbolic_basis_residuals(basis):
    # avoid the t=0 singularity of the friction coefficient when gamma=0
    for t in np.linspace(0.05, 5.0, 100):
        t = float(t)
        assert basis.y_residual(1, t) <= 1e-9
        assert basis.y_residual(2, t) <= 1e-9
        assert basis.y_particular_residual(t) <= 1e-9
        assert basis.z_residual(1, t) <= 1e-9
        assert basis.z_residual(2, t) <= 1e-9


@pytest.mark.parametrize("basis", BASES, ids=["plain", "shifted"])
def test_hyperbolic_basis_wronskians(basis):
    for t in np.linspace(0.05, 5.0, 100):
        t = float(t)
        assert basis.y_wronskian_residual(t) <= 1e-10
        assert basis.z_wronskian_residual(t) <= 1e-10


def test_hyperbolic_particular_solution_values():
    basis = dyn.HyperbolicBasis(lam=0.2, omega=1.0)
    w, lam = 1.0, 0.2
    t = 0.9
    ch = math.cosh(lam * t)
    expected = (1.0 - 2.0 * lam * lam
                / ((w * w + 4.0 * lam * lam) * ch * ch)) / (w * w)
    assert basis.y_particular(t) == pytest.approx(expected, rel=1e-14)


def test_variances_require_positive_norm():
    m = dyn.SecondMoments(p2=1.0, x2=1.0, norm=-1.0)
    with pytest.raises(InvalidMoments):
        m.variances(dyn.FirstMoments(0.1, 0.1))
