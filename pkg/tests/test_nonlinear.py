import math

import numpy as np
import pytest

from fracdecay.errors import DomainError
from fracdecay.fracode import TimeGrid, solve_linear_mode
from fracdecay.nonlinear import (FieldTrace, OperatorSpec, SourceSpec,
                                 SpatialGrid1D, check_energy_inequality,
                                 discretize_operator, predict_exponent,
                                 run_scenario, solve_nonlinear)
from fracdecay.spectral import CoefficientSpec

COEFF = CoefficientSpec(kind="power", kappa=1.0, beta=0.5)


def test_grid_geometry():
    g = SpatialGrid1D(math.pi, 31)
    assert g.h == pytest.approx(math.pi / 32)
    assert g.x[0] == pytest.approx(g.h)
    assert g.x[-1] == pytest.approx(math.pi - g.h)


def test_laplace_stencil_second_order():
    errs = []
    for M in (63, 127):
        g = SpatialGrid1D(math.pi, M)
        u = np.sin(g.x)
        out = discretize_operator(OperatorSpec(kind="laplace"), u, g)
        errs.append(np.max(np.abs(out + u)))
    assert errs[0] / errs[1] > 3.5


def test_porous_flux_matches_laplacian_of_power():
    # with g(u) = (m+1) u^m the flux form discretizes Lap(u^(m+1))
    m = 1.0
    g = SpatialGrid1D(math.pi, 255)
    u = np.sin(g.x)
    spec = OperatorSpec(kind="porous_medium", m=m, c0=m + 1.0)
    out = discretize_operator(spec, u, g)
    exact = 2.0 * np.cos(2.0 * g.x)  # Lap sin^2 = 2 cos(2x)
    assert np.max(np.abs(out - exact)) < 5e-3


def test_mean_curvature_reduces_to_laplace_for_flat_data():
    g = SpatialGrid1D(math.pi, 127)
    u = 1e-6 * np.sin(g.x)
    a = discretize_operator(OperatorSpec(kind="mean_curvature"), u, g)
    b = discretize_operator(OperatorSpec(kind="laplace"), u, g)
    assert np.max(np.abs(a - b)) < 1e-12 * np.max(np.abs(b))


def test_operator_validation():
    with pytest.raises(DomainError):
        OperatorSpec(kind="unknown")
    with pytest.raises(DomainError):
        OperatorSpec(kind="p_laplace", p=1.0)
    with pytest.raises(DomainError):
        OperatorSpec(kind="porous_medium", m=-1.0)
    with pytest.raises(DomainError):
        SourceSpec(kind="power_absorption", p=0.5)


def test_predict_exponent_table():
    vals = [
        ("laplace", {}, 1.0),
        ("p_laplace", {"p": 3.0}, 0.5),
        ("porous_medium", {"m": 1.0}, 0.5),
        ("degenerate", {"q": 1.0}, 0.5),
        ("mean_curvature", {}, 1.0),
        ("kirchhoff", {"gamma": 1.0, "p": 2.0}, 0.5),
    ]
    for kind, kw, expect in vals:
        pe = predict_exponent(OperatorSpec(kind=kind, **kw), 0.5, 0.5)
        assert pe.value == pytest.approx(expect)


def test_linear_diffusion_tracks_modal_solution():
    g = SpatialGrid1D(math.pi, 127)
    tg = TimeGrid(5.0, 512, 3.0)
    u0 = np.sin(g.x)
    tr = solve_nonlinear(OperatorSpec(kind="laplace"), SourceSpec(), 0.5,
                         COEFF, u0, g, tg)
    mode = solve_linear_mode(0.5, 0.5, 1.0, 1.0, tg)
    amp = math.sqrt(g.h * np.sum(u0 ** 2))
    mask = tr.times >= 0.1
    rel = np.abs(tr.energies[mask] - amp * mode.values[mask]) \
        / (amp * mode.values[mask])
    assert np.max(rel) < 2e-3


def test_energies_positive_decreasing():
    g = SpatialGrid1D(math.pi, 63)
    tg = TimeGrid(50.0, 256, 3.0)
    u0 = 0.5 * np.sin(g.x)
    for kind, kw in (("p_laplace", {"p": 3.0}),
                     ("porous_medium", {"m": 1.0}),
                     ("degenerate", {"q": 1.0}),
                     ("kirchhoff", {"gamma": 1.0, "p": 2.0})):
        tr = solve_nonlinear(OperatorSpec(kind=kind, **kw), SourceSpec(),
                             0.5, COEFF, u0, g, tg, sweeps=2)
        assert np.all(tr.energies > 0)
        assert np.all(np.diff(tr.energies) < 1e-14)


def test_porous_medium_preserves_positivity():
    g = SpatialGrid1D(math.pi, 63)
    tg = TimeGrid(20.0, 256, 3.0)
    u0 = 0.5 * np.sin(g.x)
    tr = solve_nonlinear(OperatorSpec(kind="porous_medium", m=1.0),
                         SourceSpec(), 0.5, COEFF, u0, g, tg, sweeps=2)
    assert np.min(tr.fields) >= -1e-10


def test_energy_inequality_margins():
    g = SpatialGrid1D(math.pi, 63)
    tg = TimeGrid(20.0, 256, 3.0)
    u0 = 0.5 * np.sin(g.x)
    tr = solve_nonlinear(OperatorSpec(kind="p_laplace", p=3.0), SourceSpec(),
                         0.5, COEFF, u0, g, tg, sweeps=2)
    margins = check_energy_inequality(tr, 0.5)
    assert np.min(margins) >= -1e-10


def test_energy_inequality_needs_fields():
    g = SpatialGrid1D(math.pi, 15)
    tg = TimeGrid(1.0, 16, 2.0)
    tr = solve_nonlinear(OperatorSpec(kind="laplace"), SourceSpec(), 0.5,
                         COEFF, np.sin(g.x), g, tg, keep_fields=False)
    with pytest.raises(DomainError):
        check_energy_inequality(tr, 0.5)


def test_fisher_scenario_respects_population_bounds():
    tr, rep = run_scenario("fisher_kpp", alpha=0.5, beta=0.5, points=63,
                           steps=256, horizon=50.0)
    assert isinstance(tr, FieldTrace)
    assert np.min(tr.fields[1:]) > 0.0
    assert np.max(tr.fields) <= 1.0 + 1e-12
    assert rep.verdict == "upper_only_ok"


def test_fisher_rejects_oversized_data():
    with pytest.raises(DomainError):
        run_scenario("fisher_kpp", amplitude=1.5, points=63, steps=64)


def test_pme_scenario_upper_envelope():
    tr, rep = run_scenario("semilinear_pme", alpha=0.5, beta=0.5, m=1.0,
                           mu=1.0, p=2.0, points=63, steps=256,
                           horizon=200.0)
    assert rep.verdict == "upper_only_ok"
    assert rep.predicted_exponent == pytest.approx(0.5)


def test_toy_model_scenario_sandwich():
    tr, rep = run_scenario("toy_model", alpha=0.3, beta=0.4)
    assert rep.verdict == "sandwich_ok"
    assert rep.fitted_exponent == pytest.approx(0.7, abs=0.05)


def test_shape_mismatch_rejected():
    g = SpatialGrid1D(math.pi, 15)
    with pytest.raises(DomainError):
        solve_nonlinear(OperatorSpec(kind="laplace"), SourceSpec(), 0.5,
                        COEFF, np.ones(7), g, TimeGrid(1.0, 8))
