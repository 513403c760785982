"""Logical error curves and pseudo-thresholds.

Samples each circuit on the standard grid, fits ``A p + B p**2`` and reports
where the fit crosses ``p_log = p``. The exact pair-level coefficient is
printed next to the fitted one as a cross-check. Set STEANE_CEC_WORKERS to
use more processes; results do not change.

    python notebooks/03_thresholds.py
"""

from steane_cec.analysis import estimate_rate, fit_and_threshold, quadratic_coeff
from steane_cec.circuit import build
from steane_cec.noise import ErrorModel

GRID = [1e-4, 2e-4, 3e-4, 5e-4, 7e-4, 1e-3]
SHOTS = 10**6

for name, channel in (("fig2", "full"), ("fig1", "bitflip"), ("fig1", "full")):
    c = build(name)
    m = ErrorModel(0.0, channel)
    points = [estimate_rate(c, m, p, SHOTS, seed=1) for p in GRID]
    fit = fit_and_threshold(points)
    print(f"\n{name} / {channel}")
    for r in points:
        print(f"  p={r.p:.0e}  p_log={r.p_log:.3e}  [{r.ci_low:.3e}, {r.ci_high:.3e}]")
    thr = "none" if fit.threshold is None else f"{fit.threshold:.2e}"
    print(f"  fit: A={fit.A:.3g}  B={fit.B:.4g}  threshold={thr}")
    q = quadratic_coeff(c, m, budget=200_000, seed=1)
    print(f"  pair census: A={q.A:.4g}  B={q.B:.4g}  [{q.ci_low:.4g}, {q.ci_high:.4g}]")
