"""Acceptance criteria, one test each, at the stated tolerances and time limits.

Each test prints a single ``PASS``/``FAIL`` line. Run the file directly
(``python3 tests/test_acceptance.py``) for just the summary lines.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from pspectral import oracles
from pspectral.eigensolver import closed_form, delta_bar, lambda0, mu_p
from pspectral.geometry import (
    SurfaceSpec,
    build_surface,
    cylinder_interval,
    sharpness_experiment,
    surface_gradient_comparison,
    verify_curvature,
)
from pspectral.ode_model import ModelParams, solve_ivp_cap
from pspectral.rayleigh import minimize_rayleigh


def criterion_1():
    worst = 0.0
    for p in (1.5, 2.0, 3.0, 4.0):
        for D in (0.5, 1.0, math.pi, 5.0):
            ref = closed_form(p, D)
            worst = max(worst, abs(mu_p(p, 0.0, D).lam - ref) / ref)
    return worst < 1e-8, f"closed form, max rel err {worst:.2e} < 1e-08", 1.0


def criterion_2():
    worst = 0.0
    for kappa in (-1.0, 1.0):
        for D in (1.0, 2.0):
            ref = oracles.neumann_fd_p2(kappa, D, 4000)
            worst = max(worst, abs(mu_p(2.0, kappa, D).lam - ref) / ref)
    return worst < 1e-5, f"p=2 finite-volume oracle, max rel err {worst:.2e} < 1e-05", 10.0


def criterion_3():
    worst = max(abs(lambda0(2.0, k) - k) / k for k in (0.5, 1.0, 2.5))
    return worst < 1e-4, f"lambda0(2, kappa) = kappa, max rel err {worst:.2e} < 1e-04", 10.0


def criterion_4():
    ok = True
    parts = []
    for p in (2.0, 3.0):
        l0 = lambda0(p, 1.0)
        lam = 1.5 * l0
        a_bar = 0.5 * delta_bar(p, 1.0, lam)
        pr = ModelParams(p, 1.0, lam)
        sym = solve_ivp_cap(pr, -a_bar, n_samples=3)
        ms, ds = [], []
        for off in (1.0, 2.0, 4.0):
            sol = solve_ivp_cap(pr, -a_bar - off, n_samples=3)
            ms.append(sol.m_of_a)
            ds.append(sol.delta_of_a)
        db = [delta_bar(p, 1.0, f * l0) for f in (1.1, 1.3, 1.5, 2.0, 3.0)]
        ok &= abs(sym.m_of_a - 1.0) < 1e-8
        ok &= 1.0 > ms[0] > ms[1] > ms[2]
        ok &= all(d > sym.delta_of_a for d in ds)
        ok &= bool(np.all(np.diff(db) < 0))
        parts.append(f"p={p:g}: |m(-a_bar)-1|={abs(sym.m_of_a - 1):.1e}, m={[round(m, 6) for m in ms]}")
    return ok, "model monotonicity; " + "; ".join(parts), 30.0


def criterion_5():
    ok = True
    gaps = []
    for p in (2.0, 3.0):
        l0 = lambda0(p, 1.0)
        for D in (1.0, 2.0, 4.0):
            mu = mu_p(p, 1.0, D).lam
            ok &= mu > l0
            gaps.append(mu - l0)
    return ok, f"mu_p > lambda0, smallest margin {min(gaps):.3e}", 10.0


def criterion_6():
    ok_err = True
    ok_rate = True
    parts = []
    for p in (2.0, 3.0):
        for kappa in (-1.0, 0.0, 1.0):
            mu = mu_p(p, kappa, 2.0).lam
            e1 = abs(minimize_rayleigh(cylinder_interval(p, kappa, 2.0, 1, 1.0, 1024)).lambda_hat - mu) / mu
            e2 = abs(minimize_rayleigh(cylinder_interval(p, kappa, 2.0, 1, 1.0, 2048)).lambda_hat - mu) / mu
            ratio = e2 / e1
            ok_err &= e1 < 2e-3
            ok_rate &= 0.35 <= ratio <= 0.65
            parts.append(f"({p:g},{kappa:g}) err {e1:.1e} ratio {ratio:.3f}")
    detail = (f"Rayleigh cross-check: errors < 2e-03 {'ok' if ok_err else 'NOT met'}; "
              f"halving (ratio 0.5 +/- 30%) {'ok' if ok_rate else 'NOT met'}; " + ", ".join(parts))
    return ok_err and ok_rate, detail, 60.0


def criterion_7():
    worst = -math.inf
    parts = []
    for p in (2.0, 3.0):
        for kappa in (0.0, 1.0):
            viol, _, _ = surface_gradient_comparison(p, kappa, n=3, D=1.0, r=0.05, delta=0.005, mesh_N=4096)
            worst = max(worst, viol)
            parts.append(f"({p:g},{kappa:g}) {viol:.2e}")
    return worst < 1e-4, f"gradient comparison, max violation {worst:.2e} < 1e-04: " + ", ".join(parts), 60.0


def criterion_8():
    slacks = []
    for kappa in (0.0, 1.0):
        for r in (0.1, 0.05, 0.02):
            surf = build_surface(SurfaceSpec(3, kappa, 1.0, r, r / 10), 4096)
            slacks.append(verify_curvature(surf, 3, kappa))
    bad = verify_curvature(build_surface(SurfaceSpec(2, 1.0, 1.0, 0.05, 0.005), 4096), 2, 1.0)
    ok = min(slacks) >= 0 and bad < 0
    return ok, f"curvature: n=3 min slack {min(slacks):.3e} >= 0, n=2 slack {bad:.3e} < 0", 5.0


def criterion_9():
    ok = True
    parts = []
    for p, kappa in ((2.0, 0.0), (2.0, 1.0), (3.0, 0.0)):
        rows = sharpness_experiment(p, kappa, 3, 1.0, [0.1, 0.05, 0.02])
        rel = [row["rel_gap"] for row in rows]
        mono = rel[0] > rel[1] > rel[2]
        ok &= mono and rel[2] < 0.05
        parts.append(f"({p:g},{kappa:g}) rel gaps {', '.join(f'{g:.4f}' for g in rel)}")
    return ok, "sharpness trend (monotone, < 5% at r=0.02): " + "; ".join(parts), 300.0


def criterion_10():
    here = Path(__file__).parent
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(here),
                           "--ignore", str(Path(__file__))], capture_output=True, text=True, check=False)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()[-200:]
    return proc.returncode == 0, f"property suites: {tail}", 120.0


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def evaluate(k):
    t0 = time.perf_counter()
    ok, detail, limit = CRITERIA[k - 1]()
    elapsed = time.perf_counter() - t0
    passed = bool(ok) and elapsed < limit
    line = f"{'PASS' if passed else 'FAIL'} criterion {k}: {detail} [{elapsed:.2f}s, limit {limit:g}s]"
    return passed, line


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k, capsys):
    passed, line = evaluate(k)
    with capsys.disabled():
        print("\n" + line)
    assert passed, line


if __name__ == "__main__":
    results = [evaluate(k) for k in range(1, 11)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
