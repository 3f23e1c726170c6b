"""Smoke test for the delay_apt_py extension module.

Build and install first:

    pip install --no-build-isolation ./crates/python
    python python/smoke_test.py
"""

import math
import os
import tempfile

import delay_apt_py as d


def check(name, ok):
    print(f"{name}: {'ok' if ok else 'FAILED'}")
    if not ok:
        raise SystemExit(1)


w = d.lambert_w(1.0)
check("lambert_w", abs(w * math.exp(w) - 1.0) < 1e-14)

a, b = d.markovian_eigenvalues(2.0, 1.0)
check("markovian_eigenvalues", abs(a.real - math.sqrt(3.0)) < 1e-12 and abs(b.real + math.sqrt(3.0)) < 1e-12)

p = d.SpectralParams(kappa=2.0, tau=0.0, delta_omega=1.0)
roots = p.eigenvalues()
check("undelayed roots", len(roots) == 2 and abs(roots[0][0] - math.sqrt(3.0)) < 1e-9)

q = d.SpectralParams(kappa=1.0, tau=1.0, delta_omega=0.0)
dome = d.central_dome_rate(1.0, 1.0, 0.0)
check("dome rate", abs(q.dominant_rate() - dome) < 1e-9)
check("rate curve", len(q.rate_curve([0.0, 1.0, 2.0])) == 3)
check("residual", abs(q.residual(complex(dome, 0.0))) < 1e-9)

edges = d.transition_detunings(1.0, 1.0, 4)
check("transition detunings", [n for n, _ in edges] == [2, 4] and abs(edges[0][1] - math.hypot(math.pi, 1.0)) < 1e-12)
check("sow_predicted", abs(d.sow_predicted(1.0, 1.0, 40, "fixed") - math.pi / 2) < 0.05)

lk = d.LkParams(kappa=1.0, tau=0.5, delta_omega=3.0)
lk.set_pump_ratio(1.5)
i1, i2, _ = d.steady_state_intensity(lk, h=1e-3, transient=5.0, retained=2.0, window=1.0)
check("steady_state_intensity", i1 > 0.0 and i2 > 0.0)

prof = d.sweep_detuning(lk, [0.0, 0.5, 1.0, 1.5], h=1e-3, transient=2.0, retained=1.0, window=1.0)
check("sweep_detuning", len(prof) == 4 and prof.failures() == 0)

grid = [i * 0.05 for i in range(1200)]
ripple = [1.0 + 0.1 * math.cos(2 * math.pi * x / 2.0) for x in grid]
sow, err, _, _ = d.SweepProfile(grid, ripple, ripple, 0.5, 1.0).extract_sow()
check("extract_sow", abs(sow - 2.0) <= err)

try:
    d.SpectralParams(kappa=-1.0, tau=1.0)
    check("invalid params raise", False)
except ValueError:
    check("invalid params raise", True)

with tempfile.TemporaryDirectory() as out:
    files = d.run_config("kappa=1\ntau=0\ndelta_omega=0.5\n", mode="eigen", overrides=[f"out={out}"])
    check("run_config", any(os.path.basename(f) == "eigenvalues.csv" for f in files))

print("all smoke checks passed")
