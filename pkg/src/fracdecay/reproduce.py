"""End-to-end verification matrix.

Each check exercises one pipeline (special function, scalar solver,
spectral solution, finite-difference solver, fitting) against a closed
form or a proved decay profile at desk scale, with pinned tolerances.
``run_all`` executes the whole matrix, optionally writing every trace as
CSV, and returns structured rows for the report table.
"""

from __future__ import annotations

import filecmp
import math
import os
import shutil
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import decayfit, io, nonlinear, spectral
from .fracode import (SemilinearParams, TimeGrid, lemma_envelope,
                      lemma_sandwich_factors, solve_linear_mode,
                      solve_semilinear)
from .nonlinear import (OperatorSpec, SourceSpec, SpatialGrid1D,
                        check_energy_inequality, predict_exponent,
                        run_scenario, solve_nonlinear)
from .specfun import (KilbasSaigoParams, SeriesAccuracy, kilbas_saigo,
                      kilbas_saigo_bounds)
from .spectral import CoefficientSpec

# tight series accuracy for identity checks at the 1e-10 level
TIGHT = SeriesAccuracy(abs_tol=1e-15, rel_tol=1e-14, max_terms=512)


@dataclass
class CriterionResult:
    label: str
    passed: bool
    detail: str
    artifacts: dict = field(default_factory=dict)  # name -> (header, columns)


def _res(label, passed, detail, artifacts=None):
    return CriterionResult(label, bool(passed), detail, artifacts or {})


# {{{ individual checks


def check_exponential_identity() -> CriterionResult:
    """E_{1,m,m-1}(z) = exp(z/m) on a 41-point grid, three m values."""
    zs = np.linspace(-5.0, 5.0, 41)
    worst = 0.0
    cols = {"z": zs}
    for m in (1.5, 2.0, 3.0):
        p = KilbasSaigoParams(alpha=1.0, m=m, l=m - 1.0)
        vals = np.array([kilbas_saigo(p, z, TIGHT) for z in zs])
        worst = max(worst, float(np.max(np.abs(vals - np.exp(zs / m)))))
        cols[f"m_{m:g}"] = vals
    return _res("kilbas-saigo-exponential-identity", worst <= 1e-10,
                f"max abs error {worst:.3e} (tol 1e-10)",
                {"specfun_identity": (list(cols), list(cols.values()))})


def check_bound_sandwich() -> CriterionResult:
    """Series value between the two-sided algebraic bounds, slack 1e-9."""
    zs = np.logspace(-3, 1, 30)
    worst = 0.0
    rows_a, rows_m, rows_z, rows_v, rows_lo, rows_hi = [], [], [], [], [], []
    for alpha in (0.1, 0.3, 0.5, 0.7, 0.9):
        for m in (1.5, 2.0, 5.0):
            p = KilbasSaigoParams(alpha=alpha, m=m, l=m - 1.0)
            for z in zs:
                v = kilbas_saigo(p, -z)
                b = kilbas_saigo_bounds(alpha, m, z)
                worst = max(worst, b.lower - v, v - b.upper)
                rows_a.append(alpha); rows_m.append(m); rows_z.append(z)
                rows_v.append(v); rows_lo.append(b.lower); rows_hi.append(b.upper)
    art = {"specfun_bounds": (["alpha", "m", "z", "value", "lower", "upper"],
                              [rows_a, rows_m, rows_z, rows_v, rows_lo, rows_hi])}
    return _res("kilbas-saigo-two-sided-bounds", worst <= 1e-9,
                f"max bound violation {worst:.3e} (slack 1e-9)", art)


def check_l1_vs_closed_form(steps=4096) -> CriterionResult:
    """L1 mode solve against the exact Kilbas-Saigo decay profile."""
    grid = TimeGrid(10.0, steps, 3.0)
    tr = solve_linear_mode(0.5, 0.5, 1.0, 1.0, grid)
    p = KilbasSaigoParams(alpha=0.5, m=2.0, l=1.0)
    mask = tr.times >= 0.1
    exact = np.array([kilbas_saigo(p, -t) for t in tr.times[mask]])
    rel = float(np.max(np.abs(tr.values[mask] - exact) / np.abs(exact)))
    art = {"l1_mode": (["t", "u", "exact"],
                       [tr.times[mask], tr.values[mask], exact])}
    return _res("l1-scheme-vs-closed-form", rel <= 5e-3,
                f"max relative error {rel:.3e} for t >= 0.1 (tol 5e-3)", art)


def check_dirichlet_sandwich() -> CriterionResult:
    """16-mode Dirichlet energy sandwiched by c/(1+lam1 t^(a+b))."""
    sysD = spectral.interval_eigensystem(math.pi, "dirichlet", 16)
    u0k = spectral.project_initial_data(sysD, lambda x: x * (math.pi - x))
    times = spectral.log_times(1e3, t_min=1e-2)
    tr = spectral.solve_subdiffusion(sysD, 0.5, 0.5, u0k, times)
    rep = spectral.verify_dirichlet_sandwich(tr, sysD, 0.5, 0.5)
    ok = (rep.verdict == "sandwich_ok"
          and abs(rep.fitted_exponent - 1.0) <= 0.05)
    s = 1.0
    lo = rep.envelope_lower / (1.0 + sysD.lambdas[0] * times ** s)
    hi = rep.envelope_upper / (1.0 + sysD.lambdas[0] * times ** s)
    art = {"dirichlet_energy": (["t", "E", "bound_lower", "bound_upper"],
                                [times, tr.energies, lo, hi])}
    return _res("dirichlet-energy-sandwich",
                ok, f"{rep.verdict}, fitted exponent {rep.fitted_exponent:.4f} "
                    f"(target 1 within 5%)", art)


def check_neumann_dichotomy() -> CriterionResult:
    """Constant data plateaus at |u00|; mean-zero data decays at lam2 rate."""
    sysN = spectral.interval_eigensystem(math.pi, "neumann", 16)
    times = spectral.log_times(1e3, t_min=1e-2)
    u0c = np.zeros(16); u0c[0] = 2.0
    trc = spectral.solve_subdiffusion(sysN, 0.5, 0.5, u0c, times)
    repc = spectral.verify_neumann(trc, sysN, 0.5, 0.5, u00=2.0, u01=0.0)
    plateau_dev = float(np.max(np.abs(trc.energies - 2.0))) / 2.0
    u0z = np.zeros(16); u0z[1] = 1.0; u0z[3] = 0.5
    trz = spectral.solve_subdiffusion(sysN, 0.5, 0.5, u0z, times)
    repz = spectral.verify_neumann(trz, sysN, 0.5, 0.5, u00=0.0, u01=1.0)
    ok = (repc.verdict in ("upper_only_ok", "sandwich_ok")
          and plateau_dev <= 0.01 and repz.verdict == "sandwich_ok")
    art = {"neumann_constant": (["t", "E"], [times, trc.energies]),
           "neumann_meanzero": (["t", "E"], [times, trz.energies])}
    return _res("neumann-plateau-vs-decay", ok,
                f"plateau deviation {plateau_dev:.2e} (tol 1e-2); "
                f"mean-zero verdict {repz.verdict}", art)


def check_heat_catalog() -> CriterionResult:
    """Model selection recovers the three closed-form heat decay laws."""
    sysD = spectral.interval_eigensystem(math.pi, "dirichlet", 8)
    lam1 = float(sysD.lambdas[0])
    u0k = np.zeros(8); u0k[0] = 1.0
    times = spectral.log_times(1e4, t_min=1.0)
    notes, ok = [], True

    # start near t = 0 so the reference level is the initial energy
    times_e = spectral.log_times(10.0, t_min=1e-2)
    coeff = CoefficientSpec(kind="exponential_rate", beta=2.0)
    tre = spectral.solve_heat_general(sysD, coeff, u0k, times_e)
    fm = decayfit.fit_model_select(times_e, tre.energies, window=1.0)
    rate = fm.params.get("rate", math.nan)  # A(t) = t^2, decay exp(-lam1 t^2)
    ok &= fm.kind == "exponential" and abs(rate - lam1) <= 0.05 * lam1 \
        and abs(fm.params.get("power", 0.0) - 2.0) <= 0.1
    notes.append(f"exponential: rate = {rate:.3f} vs lam1 = {lam1:g}")

    coeff = CoefficientSpec(kind="logarithmic", p=3.0 / lam1)
    tr = spectral.solve_heat_general(sysD, coeff, u0k, times)
    fm = decayfit.fit_model_select(times, tr.energies, window=2.0)
    pfit = fm.params.get("p", math.nan)
    ok &= fm.kind == "logarithmic" and abs(pfit - 3.0) <= 0.15
    notes.append(f"logarithmic: p*lam1 = {pfit:.3f} vs 3")
    e_log = tr.energies

    coeff = CoefficientSpec(kind="polynomial", q=1.0 / lam1, poly=(1.0, 1.0))
    tr = spectral.solve_heat_general(sysD, coeff, u0k, times)
    fm = decayfit.fit_model_select(times, tr.energies, window=2.0)
    sfit = fm.params.get("s", math.nan)
    ok &= fm.kind == "power" and abs(sfit - 1.0) <= 0.05
    notes.append(f"polynomial: exponent {sfit:.3f} vs 1")

    art = {"heat_exponential": (["t", "E"], [times_e, tre.energies]),
           "heat_catalog": (["t", "E_logarithmic", "E_polynomial"],
                            [times, e_log, tr.energies])}
    return _res("heat-coefficient-catalog", ok, "; ".join(notes), art)


def check_semilinear_sandwich(steps=2048) -> CriterionResult:
    """Scalar semilinear solve between its sub/super envelopes."""
    params = SemilinearParams(nu=1.0, delta=2.0, beta=0.5, H0=1.0)
    grid = TimeGrid(100.0, steps, 3.0)
    tr = solve_semilinear(params, 0.5, grid)
    c, C = lemma_sandwich_factors(tr, params, 0.5)
    sub, sup = lemma_envelope(params, 0.5)
    s_fit, _, _ = decayfit.fit_power_tail(tr.times, tr.values, window=1.5)
    target = (0.5 + 0.5) / 2.0
    ok = (c > 0 and math.isfinite(C)
          and np.all(c * sub(tr.times[1:]) <= tr.values[1:] * (1 + 1e-12))
          and np.all(tr.values[1:] <= C * sup(tr.times[1:]) * (1 + 1e-12))
          and abs(s_fit - target) <= 0.1 * target)
    art = {"semilinear_mode": (["t", "H", "sub_envelope", "super_envelope"],
                               [tr.times, tr.values, sub(tr.times), sup(tr.times)])}
    return _res("semilinear-envelope-sandwich", ok,
                f"factors c = {c:.3g}, C = {C:.3g}; fitted exponent "
                f"{s_fit:.4f} vs {target:g} (10%)", art)


_OPERATOR_CASES = (
    ("p_laplace", dict(kind="p_laplace", p=3.0)),
    ("porous_medium", dict(kind="porous_medium", m=1.0)),
    ("degenerate", dict(kind="degenerate", q=1.0)),
    ("mean_curvature", dict(kind="mean_curvature")),
    ("kirchhoff", dict(kind="kirchhoff", gamma=1.0, p=2.0)),
)


def run_operator_suite(points=255, steps=2048):
    """Shared runs behind the exponent-conformance and energy checks."""
    grid = SpatialGrid1D(math.pi, points)
    tgrid = TimeGrid(100.0, steps, 3.0)
    coeff = CoefficientSpec(kind="power", kappa=1.0, beta=0.5)
    src = SourceSpec(kind="none")
    out = []
    for name, kw in _OPERATOR_CASES:
        spec = OperatorSpec(**kw)
        u0 = 0.5 * np.sin(grid.x)
        tr = solve_nonlinear(spec, src, 0.5, coeff, u0, grid, tgrid, sweeps=2)
        pe = predict_exponent(spec, 0.5, 0.5)
        rep = decayfit.check_envelope(tr.times, tr.energies, pe.value,
                                      two_sided=False, predicted_tag=pe.tag)
        out.append((name, tr, pe, rep))
    return out


def check_exponent_conformance(suite) -> CriterionResult:
    notes, ok = [], True
    art = {}
    for name, tr, pe, rep in suite:
        good = rep.verdict == "upper_only_ok" and \
            math.isfinite(rep.envelope_upper) and rep.envelope_upper > 0
        ok &= good
        notes.append(f"{name}: {rep.verdict} (s = {pe.value:g})")
        bound = rep.envelope_upper / (1.0 + tr.times ** pe.value)
        art[f"nonlinear_{name}"] = (["t", "E", "predicted_bound"],
                                    [tr.times, tr.energies, bound])
    return _res("nonlinear-decay-exponents", ok, "; ".join(notes), art)


def check_energy_inequality_suite(suite) -> CriterionResult:
    worst = math.inf
    for name, tr, _, _ in suite:
        worst = min(worst, float(np.min(check_energy_inequality(tr, 0.5))))
    return _res("discrete-energy-inequality", worst >= -1e-8,
                f"min margin {worst:.3e} (tol -1e-8)")


def check_application_scenarios() -> CriterionResult:
    trf, repf = run_scenario("fisher_kpp", alpha=0.5, beta=0.5,
                             points=127, steps=1024, horizon=100.0)
    order_ok = float(np.min(trf.fields[1:])) > 0.0 \
        and float(np.max(trf.fields)) <= 1.0 + 1e-12
    trp, repp = run_scenario("semilinear_pme", alpha=0.5, beta=0.5,
                             mu=1.0, m=1.0, p=2.0,
                             points=127, steps=1024, horizon=1000.0)
    ok = order_ok and repf.verdict == "upper_only_ok" \
        and repp.verdict == "upper_only_ok"
    art = {"fisher_kpp": (["t", "E"], [trf.times, trf.energies]),
           "semilinear_pme": (["t", "E"], [trp.times, trp.energies])}
    return _res("application-scenarios", ok,
                f"population bounds {'held' if order_ok else 'violated'}; "
                f"fisher {repf.verdict}; porous-medium {repp.verdict}", art)


def check_cross_solver(points=511, steps=4096) -> CriterionResult:
    """Finite-difference Laplace run against the spectral closed form."""
    grid = SpatialGrid1D(math.pi, points)
    tgrid = TimeGrid(10.0, steps, 3.0)
    coeff = CoefficientSpec(kind="power", kappa=1.0, beta=0.5)
    u0 = np.sin(grid.x)
    tr = solve_nonlinear(OperatorSpec(kind="laplace"), SourceSpec(), 0.5,
                         coeff, u0, grid, tgrid, sweeps=1, keep_fields=False)
    p = KilbasSaigoParams(alpha=0.5, m=2.0, l=1.0)
    mask = tr.times >= 0.1
    amp = math.sqrt(math.pi / 2.0)
    exact = amp * np.abs([kilbas_saigo(p, -t) for t in tr.times[mask]])
    rel = float(np.max(np.abs(tr.energies[mask] - exact) / exact))
    art = {"cross_solver": (["t", "E_fd", "E_spectral"],
                            [tr.times[mask], tr.energies[mask], exact])}
    return _res("finite-difference-vs-spectral", rel <= 5e-3,
                f"max relative energy error {rel:.3e} for t >= 0.1 (tol 5e-3)",
                art)


def _determinism_artifacts():
    """Small representative pipeline used for the byte-identity check."""
    sysD = spectral.interval_eigensystem(math.pi, "dirichlet", 8)
    u0k = spectral.project_initial_data(sysD, lambda x: x * (math.pi - x))
    times = spectral.log_times(100.0, t_min=1e-2)
    tr = spectral.solve_subdiffusion(sysD, 0.5, 0.5, u0k, times)
    params = SemilinearParams(nu=1.0, delta=2.0, beta=0.5, H0=1.0)
    ode = solve_semilinear(params, 0.5, TimeGrid(100.0, 512, 3.0))
    return {"det_spectral": (["t", "E"], [times, tr.energies]),
            "det_ode": (["t", "H"], [ode.times, ode.values])}


def check_determinism() -> CriterionResult:
    """Recompute and rewrite a pipeline twice; outputs must match bytewise."""
    d1 = tempfile.mkdtemp(prefix="repro1_")
    d2 = tempfile.mkdtemp(prefix="repro2_")
    try:
        names = []
        for d in (d1, d2):
            for name, (hdr, cols) in _determinism_artifacts().items():
                io.write_csv_atomic(os.path.join(d, name + ".csv"), hdr, cols)
                if d == d1:
                    names.append(name + ".csv")
        same = all(filecmp.cmp(os.path.join(d1, n), os.path.join(d2, n),
                               shallow=False) for n in names)
    finally:
        shutil.rmtree(d1, ignore_errors=True)
        shutil.rmtree(d2, ignore_errors=True)
    return _res("csv-byte-determinism", same,
                "repeated runs produce byte-identical CSVs" if same
                else "outputs differ between runs")


# }}}


def run_all(out_dir: str = None, profile: str = "strict"):
    """Execute the full matrix; returns the list of CriterionResult rows."""
    if profile not in ("strict", "fast"):
        raise ValueError("profile must be strict or fast")
    fast = profile == "fast"
    rows = [
        check_exponential_identity(),
        check_bound_sandwich(),
        check_l1_vs_closed_form(steps=1024 if fast else 4096),
        check_dirichlet_sandwich(),
        check_neumann_dichotomy(),
        check_heat_catalog(),
        check_semilinear_sandwich(steps=512 if fast else 2048),
    ]
    suite = run_operator_suite(points=127 if fast else 255,
                               steps=1024 if fast else 2048)
    rows.append(check_exponent_conformance(suite))
    rows.append(check_energy_inequality_suite(suite))
    rows.append(check_application_scenarios())
    rows.append(check_cross_solver(points=255 if fast else 511,
                                   steps=2048 if fast else 4096))
    rows.append(check_determinism())
    if out_dir is not None:
        for row in rows:
            for name, (hdr, cols) in row.artifacts.items():
                io.write_csv_atomic(os.path.join(out_dir, name + ".csv"),
                                    hdr, cols)
    return rows


def format_table(rows) -> str:
    width = max(len(r.label) for r in rows)
    lines = []
    for r in rows:
        mark = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.label:<{width}}  {mark}  {r.detail}")
    n_ok = sum(r.passed for r in rows)
    lines.append(f"{n_ok}/{len(rows)} checks passed")
    return "\n".join(lines)
