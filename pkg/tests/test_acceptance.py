"""Full verification matrix at pinned tolerances.

Each test consumes one row of the shared matrix run and prints a single
pass/fail line; the matrix itself executes once per session.
"""

import pytest

from fracdecay import reproduce

LABELS = [
    "kilbas-saigo-exponential-identity",
    "kilbas-saigo-two-sided-bounds",
    "l1-scheme-vs-closed-form",
    "dirichlet-energy-sandwich",
    "neumann-plateau-vs-decay",
    "heat-coefficient-catalog",
    "semilinear-envelope-sandwich",
    "nonlinear-decay-exponents",
    "discrete-energy-inequality",
    "application-scenarios",
    "finite-difference-vs-spectral",
    "csv-byte-determinism",
]


@pytest.fixture(scope="module")
def matrix():
    rows = reproduce.run_all(profile="strict")
    return {r.label: r for r in rows}


def _check(matrix, label):
    row = matrix[label]
    print(f"{'PASS' if row.passed else 'FAIL'}: {label} -- {row.detail}")
    assert row.passed, f"{label}: {row.detail}"


def test_matrix_is_complete(matrix):
    assert sorted(matrix) == sorted(LABELS)


def test_exponential_identity(matrix):
    _check(matrix, "kilbas-saigo-exponential-identity")


def test_two_sided_bounds(matrix):
    _check(matrix, "kilbas-saigo-two-sided-bounds")


def test_l1_vs_closed_form(matrix):
    _check(matrix, "l1-scheme-vs-closed-form")


def test_dirichlet_sandwich(matrix):
    _check(matrix, "dirichlet-energy-sandwich")


def test_neumann_dichotomy(matrix):
    _check(matrix, "neumann-plateau-vs-decay")


def test_heat_catalog(matrix):
    _check(matrix, "heat-coefficient-catalog")


def test_semilinear_sandwich(matrix):
    _check(matrix, "semilinear-envelope-sandwich")


def test_nonlinear_exponents(matrix):
    _check(matrix, "nonlinear-decay-exponents")


def test_energy_inequality(matrix):
    _check(matrix, "discrete-energy-inequality")


def test_application_scenarios(matrix):
    _check(matrix, "application-scenarios")


def test_cross_solver_agreement(matrix):
    _check(matrix, "finite-difference-vs-spectral")


def test_reproduce_determinism(matrix):
    _check(matrix, "csv-byte-determinism")
