"""End-to-end verification checks.

Each check compares simulated behavior against an independent oracle: the
closed-form solutions, the constant equilibrium solutions, the trapping
regions, conserved quantities, or algebraic identities between separately
implemented formulas.  The CLI ``verify`` command and the acceptance test
suite both run this list.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass

import numpy as np

from . import dynamics, phase
from .integrate import IntegratorConfig, Trajectory, integrate, integrate_reduced
from .model import (
    FlowKind,
    FlowParams,
    energy,
    energy_density_sixth,
    normalizing_constant,
    q1_collapse_components,
    q1_normalized_components,
    spinor_coefficients,
    volume,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    note: str = ""


def _collapse(a, lam, eps):
    return FlowParams(FlowKind.COLLAPSE, a=a, kappa=lam, epsilon=eps)


def _normalized(a, mu, eps):
    return FlowParams(FlowKind.NORMALIZED, a=a, kappa=mu, epsilon=eps)


@functools.lru_cache(maxsize=None)
def _run(params: FlowParams, config: IntegratorConfig, t_end: float) -> Trajectory:
    return integrate(params, config, t_end)


_DEFAULT = IntegratorConfig()
_NO_EQUILIB = IntegratorConfig(equilib_tol=None)


def _closed_form_error(params, t_end):
    traj = _run(params, _NO_EQUILIB, t_end)
    worst = 0.0
    for state, _ in traj.samples:
        exact = dynamics.closed_form(params, state.t)
        worst = max(worst, abs(state.alpha - exact.alpha), abs(state.beta - exact.beta))
    return worst


def check_oracle_eps1_error(oracle_tol=1e-8):
    start = time.perf_counter()
    worst = _closed_form_error(_collapse(2.0, 1.0, 1.0), 15.5)
    elapsed = time.perf_counter() - start
    yield CheckResult("oracle_eps1_max_error", worst <= oracle_tol, worst, oracle_tol)
    yield CheckResult("oracle_eps1_runtime_seconds", elapsed < 1.0, elapsed, 1.0)


def check_oracle_eps1_event(oracle_tol=1e-8):
    traj = _run(_collapse(2.0, 1.0, 1.0), _NO_EQUILIB, 20.0)
    err = abs(traj.termination.t_event - 15.999984)
    ok = traj.termination.tag == "CollapsePoint" and err <= 1e-5
    yield CheckResult("oracle_eps1_event_time", ok, err, 1e-5, note=traj.termination.tag)


def check_oracle_eps23_error(oracle_tol=1e-8):
    worst = _closed_form_error(_collapse(2.0, 1.0, 2.0 / 3.0), 11.5)
    yield CheckResult("oracle_eps23_max_error", worst <= oracle_tol, worst, oracle_tol)


def check_oracle_eps23_event(oracle_tol=1e-8):
    traj = _run(_collapse(2.0, 1.0, 2.0 / 3.0), _NO_EQUILIB, 20.0)
    err = abs(traj.termination.t_event - 11.999973)
    ok = traj.termination.tag == "CollapsePoint" and err <= 1e-5
    yield CheckResult("oracle_eps23_event_time", ok, err, 1e-5, note=traj.termination.tag)


def check_constant_solutions(oracle_tol=1e-8):
    cases = [
        _normalized(2.0, 0.5, 2.0 / 3.0),
        _normalized(2.0, 0.5, 1.0),
        _normalized(2.0, -0.5, 1.0),
    ]
    worst = 0.0
    for params in cases:
        start = dynamics.initial_state(params)
        traj = _run(params, _NO_EQUILIB, 100.0)
        for state, _ in traj.samples:
            worst = max(worst, abs(state.alpha - start.alpha), abs(state.beta - start.beta))
    yield CheckResult("constant_solution_drift", worst <= 1e-10, worst, 1e-10)


def _convergent_runs():
    cases = [_normalized(2.0, 0.5, e) for e in (0.8, 2.0, 5.0)]
    cases += [_normalized(2.0, -0.5, e) for e in (0.2, 1.0, 5.0)]
    return [(p, _run(p, _DEFAULT, 500.0)) for p in cases]


def check_convergence(oracle_tol=1e-8):
    target = math.sqrt(normalizing_constant(1.0))
    worst = 0.0
    for params, traj in _convergent_runs():
        final = traj.final_state
        worst = max(worst, abs(final.alpha - target), abs(final.beta - target))
    yield CheckResult("stability_convergence", worst <= 1e-6, worst, 1e-6)

    min_beta = math.inf
    tags_ok = True
    for eps in (0.3, 0.5):
        traj = _run(_normalized(2.0, 0.5, eps), _DEFAULT, 2000.0)
        tags_ok = tags_ok and traj.termination.tag == "CollapseFiber"
        min_beta = min(min_beta, traj.final_state.beta)
    yield CheckResult(
        "stability_divergence_beta", tags_ok and min_beta > 5.0, min_beta, 5.0,
        note="fiber scale collapses while base scale grows"
    )


def check_collapse_events(oracle_tol=1e-8):
    ok = True
    worst_note = []
    for eps in (0.5, 1.0, 3.0):
        traj = _run(_collapse(2.0, -1.0, eps), _DEFAULT, 5000.0)
        term = traj.termination
        inside = False
        if term.tag == "CollapseFiber" and "bracket" in term.detail:
            lo, hi = term.detail["bracket"]
            inside = lo < term.detail["beta_inf"] < hi
        ok = ok and inside
        worst_note.append(f"eps={eps}:{term.tag}")
    yield CheckResult("collapse_fiber_brackets", ok, float(ok), 1.0, note=";".join(worst_note))

    ok = True
    notes = []
    for eps in (0.8, 1.3):
        traj = _run(_collapse(2.0, 1.0, eps), _DEFAULT, 5000.0)
        ok = ok and traj.termination.tag == "CollapsePoint"
        notes.append(f"eps={eps}:{traj.termination.tag}")
    yield CheckResult("collapse_point_events", ok, float(ok), 1.0, note=";".join(notes))


def check_volume_conservation(oracle_tol=1e-8):
    worst = 0.0
    for params, traj in _convergent_runs():
        for state, scalars in traj.samples:
            worst = max(worst, abs(scalars.volume - 1.0))
    yield CheckResult("volume_conservation", worst <= 1e-8, worst, 1e-8)


def check_energy_monotonic(oracle_tol=1e-8):
    rng = np.random.default_rng(12345)
    worst = -math.inf
    for _ in range(20):
        a = rng.choice([-2.0, 2.0])
        sign = rng.choice([-1.0, 1.0])
        eps = rng.uniform(0.3, 2.5)
        if rng.random() < 0.5:
            params = _collapse(a, sign, eps)
            t_end = 5.0
        else:
            params = _normalized(a, 0.5 * sign, eps)
            t_end = 30.0
        traj = integrate(params, _DEFAULT, t_end)
        energies = [s.energy for _, s in traj.samples]
        increments = np.diff(energies)
        worst = max(worst, float(increments.max()) if increments.size else 0.0)
    yield CheckResult("energy_monotonic_increase", worst <= 1e-10, worst, 1e-10)


def check_algebraic_identities(oracle_tol=1e-8):
    rng = np.random.default_rng(2024)
    pts = rng.uniform(0.1, 3.0, size=(1000, 2))
    param_sets = [
        _collapse(2.0, 1.0, 1.0),
        _collapse(2.0, -1.0, 1.0),
        _normalized(2.0, 0.5, 1.0),
        _normalized(2.0, -0.5, 1.0),
    ]

    worst_q = 0.0
    for params in param_sets:
        for x, y in pts:
            dx, dy = dynamics.vector_field(params, (x, y))
            if params.kind is FlowKind.COLLAPSE:
                q00, q11 = q1_collapse_components(params, x, y)
            else:
                q00, q11 = q1_normalized_components(params, x, y)
                e6 = energy_density_sixth(params, x, y)
                q00, q11 = q00 + e6, q11 + e6
            worst_q = max(worst_q, abs(dx - 0.5 * x * q00), abs(dy - 0.5 * y * q11))
    yield CheckResult("q_consistency", worst_q <= 1e-13, worst_q, 1e-13)

    worst_t = 0.0
    for params in param_sets[2:]:
        for eps in rng.uniform(0.1, 3.0, size=1000):
            res = dynamics.tangency_residual(params, eps)
            fx, fy = dynamics.vector_field(params, dynamics.curve_point(eps))
            mag = math.hypot(fx, fy)
            worst_t = max(worst_t, res / mag if mag > 0 else res)
    yield CheckResult("tangency_residual_relative", worst_t <= 1e-10, worst_t, 1e-10)

    worst_e = 0.0
    for params in param_sets[2:]:
        for x, y in pts:
            f, g = spinor_coefficients(params, x, y)
            lhs = (f * f + 2.0 * g * g) / 12.0
            rhs = energy_density_sixth(params, x, y)
            worst_e = max(worst_e, abs(lhs - rhs) / abs(rhs))
    yield CheckResult("energy_identity_relative", worst_e <= 1e-12, worst_e, 1e-12)

    worst_s = 0.0
    for params in param_sets:
        flipped = FlowParams(params.kind, -params.a, -params.kappa, params.epsilon)
        for x, y in pts[:250]:
            d1 = dynamics.vector_field(params, (x, y))
            d2 = dynamics.vector_field(flipped, (x, y))
            worst_s = max(worst_s, abs(d1[0] - d2[0]), abs(d1[1] - d2[1]))
            worst_s = max(worst_s, abs(energy(params, x, y) - energy(flipped, x, y)))
            f1, g1 = spinor_coefficients(params, x, y)
            f2, g2 = spinor_coefficients(flipped, x, y)
            worst_s = max(worst_s, abs(f1 + f2), abs(g1 + g2))
    yield CheckResult("sign_flip_symmetry", worst_s == 0.0, worst_s, 0.0)


def _trapping_cases():
    cases = [(_collapse(2.0, -1.0, 1.0), 5000.0)]
    cases += [(_collapse(2.0, 1.0, e), 5000.0) for e in (0.4, 0.8, 1.3)]
    out = []
    for params, t_end in cases:
        region = phase.region_for_initial(params, dynamics.initial_state(params))
        out.append((params, region, _run(params, _DEFAULT, t_end)))
    return out


def check_trapping(oracle_tol=1e-8):
    worst = 0.0
    n_violations = 0
    for params, region, traj in _trapping_cases():
        worst = max(worst, phase.containment_report(traj, region))
        n_violations += len(phase.inward_flux_check(region, params, n_samples=1000))
    yield CheckResult("trapping_containment", worst <= 1e-9, worst, 1e-9)
    yield CheckResult("trapping_inward_flux_violations", n_violations == 0, float(n_violations), 0.0)


def check_spinor_limits(oracle_tol=1e-8):
    params = _normalized(2.0, -0.5, 1.5)
    traj = _run(params, _DEFAULT, 500.0)
    final = traj.final_state
    f, g = spinor_coefficients(params, final.alpha, final.beta)
    target = params.kappa / math.sqrt(normalizing_constant(1.0))
    worst = max(abs(f - target), abs(g - target))
    yield CheckResult("spinor_coefficient_limits", worst <= 1e-6, worst, 1e-6)


def check_reduced_planar(oracle_tol=1e-8):
    params = _normalized(2.0, 0.5, 2.0)
    worst = 0.0
    for t_end in (1.0, 2.0, 5.0):
        planar = _run(params, _DEFAULT, t_end).final_state
        reduced = integrate_reduced(params, _DEFAULT, epsilon0=2.0, t_end=t_end)
        x, y = dynamics.curve_point(reduced[-1][1])
        worst = max(worst, abs(planar.alpha - x), abs(planar.beta - y))
    yield CheckResult("reduced_planar_agreement", worst <= 1e-7, worst, 1e-7)


# (result names, producer) -- the names let a filter skip whole producers
ALL_CHECKS = [
    (("oracle_eps1_max_error", "oracle_eps1_runtime_seconds"), check_oracle_eps1_error),
    (("oracle_eps1_event_time",), check_oracle_eps1_event),
    (("oracle_eps23_max_error",), check_oracle_eps23_error),
    (("oracle_eps23_event_time",), check_oracle_eps23_event),
    (("constant_solution_drift",), check_constant_solutions),
    (("stability_convergence", "stability_divergence_beta"), check_convergence),
    (("collapse_fiber_brackets", "collapse_point_events"), check_collapse_events),
    (("volume_conservation",), check_volume_conservation),
    (("energy_monotonic_increase",), check_energy_monotonic),
    (
        (
            "q_consistency",
            "tangency_residual_relative",
            "energy_identity_relative",
            "sign_flip_symmetry",
        ),
        check_algebraic_identities,
    ),
    (("trapping_containment", "trapping_inward_flux_violations"), check_trapping),
    (("spinor_coefficient_limits",), check_spinor_limits),
    (("reduced_planar_agreement",), check_reduced_planar),
]


def run_checks(name_filter: str = "", oracle_tol: float = 1e-8) -> list[CheckResult]:
    """Run the verification suite, optionally keeping only checks whose
    name contains ``name_filter``."""
    results = []
    for names, fn in ALL_CHECKS:
        if name_filter and not any(name_filter in n for n in names):
            continue
        for result in fn(oracle_tol=oracle_tol):
            if name_filter in result.name:
                results.append(result)
    return results
