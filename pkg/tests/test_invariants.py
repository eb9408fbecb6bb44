import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadham import coefficients as coeff
from quadham import invariants as inv
from quadham.errors import (AuxiliaryResidualTooLarge, ConstraintViolated,
                            InvalidC0, KappaCollapse, NoClosedForm,
                            NonPositiveForm, ResidualTooLarge)

CATALOG_SPECS = [
    coeff.ModelSpec(coeff.CALDIROLA_KANAI, 1.0, 0.1),
    coeff.ModelSpec(coeff.MODIFIED_CK, 1.0, 0.1),
    coeff.ModelSpec(coeff.UNITED, 1.0, 0.3, 0.1),
    coeff.ModelSpec(coeff.MODIFIED_OSCILLATOR),
    coeff.ModelSpec(coeff.CJ_COORDINATE, 1.0, 0.2),
    coeff.ModelSpec(coeff.CJ_MOMENTUM, 1.0, 0.2),
    coeff.ModelSpec(coeff.MODIFIED_PARAMETRIC, 1.0, 0.2, delta=0.5),
    coeff.ModelSpec(coeff.PARAMETRIC_SECH2, 1.0, 0.2),
    coeff.ModelSpec(coeff.SIMPLE_HARMONIC, 1.0),
    coeff.ModelSpec(coeff.FREE_PARTICLE),
]

UNITED = coeff.ModelSpec(coeff.UNITED, 1.0, 0.3, 0.1)


@pytest.mark.parametrize("spec", CATALOG_SPECS, ids=lambda s: s.model_id)
def test_catalog_entry_solves_conservation_system(spec):
    # propagating the t=0 entry through the conservation ODE must land on
    # the closed-form entry at every later time
    tc = inv.catalog_coefficients(spec)
    q0 = inv.energy_operator_catalog(spec, 0.0)
    path = inv.solve_energy_system(tc, (q0.A, q0.B, q0.C, q0.D), 2.0)
    for t in np.linspace(0.25, 2.0, 8):
        got = path(float(t))
        ref = inv.energy_operator_catalog(spec, float(t))
        scale = max(1.0, abs(ref.A), abs(ref.B), abs(ref.C))
        for g, r in ((got.A, ref.A), (got.B, ref.B),
                     (got.C, ref.C), (got.D, ref.D)):
            assert abs(g - r) <= 1e-8 * scale


def test_energy_system_three_component_init():
    spec = coeff.ModelSpec(coeff.CALDIROLA_KANAI, 1.0, 0.1)
    tc = inv.catalog_coefficients(spec)
    q0 = inv.energy_operator_catalog(spec, 0.0)
    path = inv.solve_energy_system(tc, (q0.A, q0.B, q0.C), 1.0)
    got = path(1.0)
    assert got.C == pytest.approx(got.D, abs=1e-12)


def test_united_elementary_mu_residual():
    mu_fn, C0 = inv.united_invariant_mu(UNITED)
    tc = coeff.builtin_coefficients(UNITED, coeff.HAMILTONIAN)
    assert C0 == pytest.approx(0.25 * UNITED.omega ** 2, rel=1e-14)
    for t in np.linspace(0.0, 3.0, 13):
        assert inv.auxiliary_residual(tc, mu_fn, C0, float(t)) <= 1e-10


def test_united_general_invariant_reproduces_catalog():
    mu_fn, C0 = inv.united_invariant_mu(UNITED)
    tc = coeff.builtin_coefficients(UNITED, coeff.HAMILTONIAN)
    for t in (0.0, 0.7, 1.9):
        got = inv.general_invariant(tc, mu_fn, C0, t)
        ref = inv.energy_operator_catalog(UNITED, t)
        scale = max(abs(ref.A), abs(ref.B), 1.0)
        for g, r in ((got.A, ref.A), (got.B, ref.B),
                     (got.C, ref.C), (got.D, ref.D)):
            assert abs(g - r) <= 1e-10 * scale


def test_united_invariant_mu_only_for_united():
    with pytest.raises(NoClosedForm):
        inv.united_invariant_mu(coeff.ModelSpec(coeff.SIMPLE_HARMONIC, 1.0))


def test_general_invariant_rejects_bad_mu():
    tc = coeff.builtin_coefficients(UNITED, coeff.HAMILTONIAN)
    bad = lambda t: (1.0 + t, 1.0, 0.0)
    with pytest.raises(AuxiliaryResidualTooLarge):
        inv.general_invariant(tc, bad, 0.25, 1.0)


def test_superposed_mu_solves_auxiliary_equation():
    tc = coeff.builtin_coefficients(UNITED, coeff.HAMILTONIAN)
    u = inv.solve_linear_auxiliary(tc, (1.0, 0.0), 2.0)
    v = inv.solve_linear_auxiliary(tc, (0.0, 1.0), 2.0)
    mu_fn, C0 = inv.superpose_linear_solutions(tc, u, v, 1.2, 0.3, 0.9)
    for t in np.linspace(0.0, 2.0, 9):
        assert inv.auxiliary_residual(tc, mu_fn, C0, float(t)) <= 1e-9


@settings(max_examples=12, deadline=None)
@given(A=st.floats(0.5, 2.0), C=st.floats(0.5, 2.0),
       frac=st.floats(-0.9, 0.9))
def test_superposition_property_random_coefficients(A, C, frac):
    B = frac * math.sqrt(A * C)
    spec = coeff.ModelSpec(coeff.CALDIROLA_KANAI, 1.0, 0.1)
    tc = coeff.builtin_coefficients(spec, coeff.HAMILTONIAN)
    u = inv.solve_linear_auxiliary(tc, (1.0, 0.0), 1.5)
    v = inv.solve_linear_auxiliary(tc, (0.0, 1.0), 1.5)
    mu_fn, C0 = inv.superpose_linear_solutions(tc, u, v, A, B, C)
    for t in (0.0, 0.6, 1.4):
        assert inv.auxiliary_residual(tc, mu_fn, C0, t) <= 1e-9


def test_pinney_matches_direct_ermakov():
    # constant frequency: u = cos, v = sin, W = 1
    u = lambda t: (math.cos(t), -math.sin(t))
    v = lambda t: (math.sin(t), math.cos(t))
    sol = inv.pinney_superpose(u, v, A=2.0, B=0.3, C=1.0, W=1.0)
    direct = inv.solve_ermakov(lambda t: 1.0, sol.C0,
                               (sol.kappa(0.0), sol.kappa_prime(0.0)), 3.0)
    for t in np.linspace(0.0, 3.0, 13):
        assert direct.kappa(float(t)) == pytest.approx(sol.kappa(float(t)),
                                                       rel=1e-8)


def test_pinney_constraint_check():
    u = lambda t: (math.cos(t), -math.sin(t))
    v = lambda t: (math.sin(t), math.cos(t))
    with pytest.raises(ConstraintViolated):
        inv.pinney_superpose(u, v, 1.0, 0.0, 1.0, 1.0, c0=2.0)


def test_pinney_nonpositive_form():
    u = lambda t: (math.cos(t), -math.sin(t))
    v = lambda t: (math.sin(t), math.cos(t))
    sol = inv.pinney_superpose(u, v, A=1.0, B=-1.0, C=1.0, W=1.0)
    with pytest.raises(NonPositiveForm):
        sol.kappa(math.pi / 4)


def test_kappa_collapse_detected():
    with pytest.raises(KappaCollapse):
        inv.solve_ermakov(lambda t: 0.0, 0.0, (1.0, -1.0), 3.0)


def test_lewis_riesenfeld_equals_general_route():
    # with a = 1/2 and no drift the two constructions coincide exactly
    half = lambda t: 0.5
    zero = lambda t: 0.0
    b_of = lambda t: 0.5 * (1.0 + 0.3 * math.sin(t))
    db = lambda t: 0.15 * math.cos(t)
    tc = coeff.TimeCoefficients(half, b_of, zero, zero, coeff.HAMILTONIAN,
                                zero, db, zero, zero)
    c0 = 0.7
    sol = inv.solve_ermakov(lambda t: 2.0 * b_of(t), c0, (1.0, 0.2), 2.0)
    mu_fn = lambda t: (sol.kappa(t), sol.kappa_prime(t))
    for t in (0.3, 1.1, 1.9):
        lr = inv.lewis_riesenfeld_invariant(sol, t)
        gen = inv.general_invariant(tc, mu_fn, c0, t, residual_tol=1e-6)
        assert gen.A == pytest.approx(lr.A, rel=1e-9)
        assert gen.B == pytest.approx(lr.B, rel=1e-9)
        assert gen.C == pytest.approx(lr.C, rel=1e-9)


def test_invariant_expectation_is_constant_under_moment_flow():
    # contract the catalogued operator with moments evolved by the moment
    # ODE; the expectation must stay flat
    from quadham import dynamics as dyn

    spec = coeff.ModelSpec(coeff.UNITED, 1.0, 0.3, 0.1)
    tc = coeff.builtin_coefficients(spec, coeff.HAMILTONIAN)
    m0 = dyn.SecondMoments(p2=0.8, x2=0.7, pxxp=0.1, norm=1.0)
    path = dyn.evolve_second_moments(tc, m0, 2.0)
    e0 = inv.energy_operator_catalog(spec, 0.0).expectation(
        m0.p2, m0.x2, m0.pxxp)
    for t in np.linspace(0.2, 2.0, 7):
        m = path(float(t))
        e = inv.energy_operator_catalog(spec, float(t)).expectation(
            m.p2, m.x2, m.pxxp)
        assert e == pytest.approx(e0, rel=1e-8)


def test_ladder_commutator_and_reconstruction():
    tc = coeff.builtin_coefficients(UNITED, coeff.HAMILTONIAN)
    mu_fn, C0 = inv.united_invariant_mu(UNITED)
    for t in (0.0, 0.8, 1.6):
        pair = inv.ladder_factorization(tc, mu_fn, C0, t)
        assert pair.commutator() == pytest.approx(1.0, abs=1e-12)
        rec = pair.reconstruct()
        ref = inv.general_invariant(tc, mu_fn, C0, t)
        scale = max(abs(ref.A), abs(ref.B), 1.0)
        assert abs(rec.A - ref.A) <= 1e-10 * scale
        assert abs(rec.B - ref.B) <= 1e-10 * scale
        assert abs(rec.C - ref.C) <= 1e-10 * scale


def test_ladder_requires_positive_c0():
    tc = coeff.builtin_coefficients(UNITED, coeff.HAMILTONIAN)
    mu_fn, _ = inv.united_invariant_mu(UNITED)
    with pytest.raises(InvalidC0):
        inv.ladder_factorization(tc, mu_fn, -1.0, 0.5)


def test_linear_invariant_is_conserved():
    # no-drift oscillator: A = cos(t) solves the linear-invariant equation
    # and <P> = A <p> + B <x> stays constant along the first-moment flow
    from quadham import dynamics as dyn

    spec = coeff.ModelSpec(coeff.SIMPLE_HARMONIC, 1.0)
    tc = coeff.builtin_coefficients(spec, coeff.HAMILTONIAN)
    A_fn = lambda t: (math.cos(t), -math.sin(t), -math.cos(t))
    fm_path = dyn.evolve_first_moments(tc, dyn.FirstMoments(0.4, -0.3), 2.0)
    vals = []
    for t in (0.0, 0.5, 1.0, 2.0):
        form = inv.linear_invariant(tc, A_fn, 0.2, t)
        fm = fm_path(t)
        vals.append(form.A * fm.p + form.B * fm.x + form.C)
    assert max(vals) - min(vals) <= 1e-9


def test_linear_invariant_rejects_bad_solution():
    spec = coeff.ModelSpec(coeff.SIMPLE_HARMONIC, 1.0)
    tc = coeff.builtin_coefficients(spec, coeff.HAMILTONIAN)
    bad = lambda t: (1.0 + t * t, 2.0 * t, 2.0)
    with pytest.raises(ResidualTooLarge):
        inv.linear_invariant(tc, bad, 0.0, 1.0)


def test_invariant_diagnostics_keys():
    tc = coeff.builtin_coefficients(UNITED, coeff.HAMILTONIAN)
    mu_fn, _ = inv.united_invariant_mu(UNITED)
    d = inv.invariant_diagnostics(tc, mu_fn, 0.5)
    for key in ("kappa", "mu1", "mu2", "proper_time", "key"):
        assert key in d and math.isfinite(d[key])
    # at t=0 the integrating factors are 1 and proper time 0
    d0 = inv.invariant_diagnostics(tc, mu_fn, 0.0)
    assert d0["mu1"] == pytest.approx(1.0)
    assert d0["mu2"] == pytest.approx(1.0)
    assert d0["proper_time"] == pytest.approx(0.0, abs=1e-12)
