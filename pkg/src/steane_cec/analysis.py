"""Logical error rates: Monte Carlo estimates, exact single-fault census,
pair-level quadratic coefficient, and the ``A p + B p**2`` fit with its
pseudo-threshold."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np
from scipy.optimize import nnls

from .circuit import Circuit, extraction_windows
from .engine import BatchEngine
from .noise import (CHUNK, ErrorModel, FaultEvent, SiteTable, fault_sites, sample_chunk,
                    sample_pair_keys)
from .pauli import N_QUBITS, PauliString
from .steane import ANCILLAS

Z95 = NormalDist().inv_cdf(0.975)


def wilson_interval(failures: int, shots: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if shots <= 0:
        return 0.0, 1.0
    ph = failures / shots
    denom = 1 + z * z / shots
    center = (ph + z * z / (2 * shots)) / denom
    half = z / denom * math.sqrt(ph * (1 - ph) / shots + z * z / (4 * shots * shots))
    lo, hi = max(0.0, center - half), min(1.0, center + half)
    # keep the point estimate inside the interval despite rounding
    return min(lo, ph), max(hi, ph)


@dataclass(frozen=True)
class RateEstimate:
    p: float
    shots: int
    failures: int
    ci_low: float
    ci_high: float

    @property
    def p_log(self) -> float:
        return self.failures / self.shots


# --- Monte Carlo ----------------------------------------------------------

_ENGINES: dict[tuple, tuple[BatchEngine, SiteTable]] = {}


def _engine_for(c: Circuit, m: ErrorModel) -> tuple[BatchEngine, SiteTable]:
    key = (id(c), m.ancilla_channel, m.multiqubit)
    hit = _ENGINES.get(key)
    if hit is None or hit[0].circuit is not c:
        eng = BatchEngine(c)
        table = SiteTable.build(fault_sites(c, m, eng.locations))
        hit = _ENGINES[key] = (eng, table)
    return hit


def _chunk_failures(c: Circuit, m: ErrorModel, seed: int, chunk: int, n: int) -> int:
    eng, table = _engine_for(c, m)
    rng = np.random.default_rng([seed, chunk])
    shot, loc, fx, fz = sample_chunk(table, m.p, n, rng)
    if len(shot) == 0:
        return 0
    # only shots with at least one fault need simulating
    uniq, compact = np.unique(shot, return_inverse=True)
    cls = eng.run(len(uniq), compact, loc, fx, fz)
    return int(np.count_nonzero(cls))


def _chunk_job(args) -> int:
    return _chunk_failures(*args)


def default_workers() -> int:
    return int(os.environ.get("STEANE_CEC_WORKERS", "1"))


def estimate_rate(c: Circuit, m: ErrorModel, p: float | None = None, shots: int = 10**6,
                  seed: int = 0, workers: int | None = None) -> RateEstimate:
    """Fraction of shots ending in a logical error, with a 95% Wilson interval.

    Shots are split into fixed chunks of ``CHUNK`` shots, each with its own
    stream seeded by ``(seed, chunk)``, so results do not depend on
    ``workers``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    m = m if p is None else m.with_p(p)
    jobs = [(c, m, seed, k, min(CHUNK, shots - k * CHUNK))
            for k in range(math.ceil(shots / CHUNK))]
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            failures = sum(pool.map(_chunk_job, jobs))
    else:
        failures = sum(_chunk_job(j) for j in jobs)
    lo, hi = wilson_interval(failures, shots)
    return RateEstimate(m.p, shots, failures, lo, hi)


# --- exact single-fault census -------------------------------------------

@dataclass
class FaultCensus:
    """First-order (single-fault) malignancy of a circuit under an error model.

    ``per_location`` maps location id to ``(malignant, admissible, share)``,
    where ``share`` is that location's contribution to ``A``. ``windows``
    maps each ancilla extraction window ``(ancilla, half)`` that holds
    malignant faults to the summed shares of its gate and idle locations.
    """

    A: float
    N_m: int
    N_g: int
    N_other: int
    per_location: dict[int, tuple[int, int, float]]
    malignant: list[FaultEvent]
    windows: dict[tuple[int, int], dict[str, float]] = field(default_factory=dict)
    n_sites: int = 0

    @property
    def shortcut_A(self) -> float:
        """``N_m * 2/3 + N_g * 8/15``, for comparison with the exact sum."""
        return self.N_m * 2 / 3 + self.N_g * 8 / 15


def fault_census(c: Circuit, m: ErrorModel) -> FaultCensus:
    """Run every single fault once and aggregate the malignant ones."""
    eng = BatchEngine(c)
    locs = eng.locations
    sites = fault_sites(c, m, locs)
    loc_id, fx, fz, weight = [], [], [], []
    admissible: dict[int, int] = {}
    for s in sites:
        admissible[s.location] = admissible.get(s.location, 0) + len(s.options)
        for x, z in s.options:
            loc_id.append(s.location)
            fx.append(x)
            fz.append(z)
            weight.append(1.0 / len(s.options))
    n = len(loc_id)
    cls = eng.run(n, np.arange(n), loc_id, fx, fz)
    mal = np.flatnonzero(cls)
    per_location: dict[int, tuple[int, int, float]] = {}
    malignant = []
    for i in mal:
        lid = loc_id[i]
        k, tot, share = per_location.get(lid, (0, admissible[lid], 0.0))
        per_location[lid] = (k + 1, tot, share + weight[i])
        malignant.append(FaultEvent(lid, PauliString(N_QUBITS, fx[i], fz[i])))
    A = math.fsum(weight[i] for i in mal)
    n_m = sum(len(locs[i].support) == 1 for i in per_location)
    n_g = sum(locs[i].gate_kind == "CNOT" for i in per_location)
    census = FaultCensus(A, n_m, n_g, len(per_location) - n_m - n_g, per_location,
                         malignant, n_sites=len(sites))
    census.windows = _window_shares(c, locs, per_location)
    return census


def _window_shares(c, locs, per_location):
    """Attribute malignant ancilla locations to the extraction windows they bound."""
    out: dict[tuple[int, int], dict[str, float]] = {}
    for key, steps in extraction_windows(c).items():
        if len(steps) < 4:
            continue
        a = key[0]
        lo, hi = steps[1], steps[2]  # second and third entangling gate
        gate = idle = 0.0
        for lid, (_, _, share) in per_location.items():
            loc = locs[lid]
            if a not in loc.support or not lo <= loc.timestep <= hi:
                continue
            if loc.kind == "IDLE":
                idle += share
            else:
                gate += share
        if gate or idle:
            out[key] = {"gate": gate, "idle": idle}
    return out


def in_extraction_window(c: Circuit, loc, half: int = 0) -> bool:
    """True if ``loc`` is on an ancilla strictly inside that ancilla's run of
    entangling gates in the given extraction half (gate faults count as
    occurring after their gate)."""
    wins = extraction_windows(c)
    for a in loc.support:
        if a not in ANCILLAS:
            continue
        steps = wins[(a, half)]
        if steps and steps[0] <= loc.timestep < steps[-1]:
            return True
    return False


# --- second order ---------------------------------------------------------

@dataclass(frozen=True)
class QuadraticEstimate:
    B: float
    ci_low: float
    ci_high: float
    A: float
    pair_sum: float
    pairs: int
    malignant_pairs: int
    fraction: float
    exhaustive: bool

    @property
    def wide(self) -> bool:
        """Flag for a subsample too small to pin ``B`` within 20%."""
        return self.B <= 0 or (self.ci_high - self.ci_low) > 0.4 * abs(self.B)


def _pair_batch(eng: BatchEngine, sites, rows: np.ndarray) -> np.ndarray:
    k = len(rows)
    locs = np.array([s.location for s in sites], dtype=np.int64)
    xs = [np.array([o[0] for o in s.options], dtype=np.uint16) for s in sites]
    zs = [np.array([o[1] for o in s.options], dtype=np.uint16) for s in sites]
    fx = np.empty(2 * k, np.uint16)
    fz = np.empty(2 * k, np.uint16)
    for half, (si, oi) in enumerate(((rows[:, 0], rows[:, 1]), (rows[:, 2], rows[:, 3]))):
        sl = slice(half * k, (half + 1) * k)
        fx[sl] = [xs[s][o] for s, o in zip(si.tolist(), oi.tolist())]
        fz[sl] = [zs[s][o] for s, o in zip(si.tolist(), oi.tolist())]
    shot = np.concatenate([np.arange(k), np.arange(k)])
    loc = np.concatenate([locs[rows[:, 0]], locs[rows[:, 2]]])
    return eng.run(k, shot, loc, fx, fz) != 0


def _all_pair_rows(sites, batch: int):
    n_opt = [len(s.options) for s in sites]
    buf = []
    size = 0
    for i in range(len(sites)):
        for j in range(i + 1, len(sites)):
            a, b = np.meshgrid(np.arange(n_opt[i]), np.arange(n_opt[j]), indexing="ij")
            block = np.stack([np.full(a.size, i), a.ravel(), np.full(a.size, j), b.ravel()], 1)
            buf.append(block)
            size += len(block)
            if size >= batch:
                yield np.concatenate(buf)
                buf, size = [], 0
    if buf:
        yield np.concatenate(buf)


def quadratic_coeff(c: Circuit, m: ErrorModel, budget: int | str = 200_000, seed: int = 0,
                    census: FaultCensus | None = None) -> QuadraticEstimate:
    """Coefficient of ``p**2`` in the logical error rate.

    The pair sum runs over fault pairs at distinct sites weighted by their
    relative probability; the Taylor coefficient also subtracts the
    ``(n_sites - 1) * A`` term from expanding the no-other-fault factor of
    single faults. ``budget="all"`` is exact; an integer subsamples pairs
    and gives a 95% interval.
    """
    census = fault_census(c, m) if census is None else census
    eng = BatchEngine(c)
    sites = fault_sites(c, m, eng.locations)
    n_sites = len(sites)
    site_pairs = math.comb(n_sites, 2)
    correction = (n_sites - 1) * census.A
    w = np.array([1.0 / len(s.options) for s in sites])
    if budget == "all":
        pair_sum = 0.0
        count = mal_count = 0
        for rows in _all_pair_rows(sites, 1 << 20):
            mal = _pair_batch(eng, sites, rows)
            pair_sum += float(np.sum(w[rows[mal, 0]] * w[rows[mal, 2]]))
            count += len(rows)
            mal_count += int(mal.sum())
        B = pair_sum - correction
        return QuadraticEstimate(B, B, B, census.A, pair_sum, count, mal_count, 1.0, True)
    rows = sample_pair_keys(sites, int(budget), seed)
    mal = np.zeros(len(rows), bool)
    for start in range(0, len(rows), 1 << 20):
        mal[start:start + (1 << 20)] = _pair_batch(eng, sites, rows[start:start + (1 << 20)])
    k = int(mal.sum())
    lo, hi = wilson_interval(k, len(rows))
    frac = k / len(rows)
    return QuadraticEstimate(site_pairs * frac - correction, site_pairs * lo - correction,
                             site_pairs * hi - correction, census.A, site_pairs * frac,
                             len(rows), k, len(rows) / site_pairs, False)


# --- fit ------------------------------------------------------------------

class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    A: float
    B: float
    threshold: float | None


def threshold_from(A: float, B: float) -> float | None:
    """Positive root of ``A p + B p**2 = p``, or None if the curve never crosses."""
    if A < 1 and B > 0:
        return (1 - A) / B
    return None


def fit_and_threshold(points: list[RateEstimate]) -> FitResult:
    """Weighted least squares of ``p_log`` on ``(p, p**2)`` with ``A, B >= 0``.

    Each point is weighted by the inverse variance implied by its 95%
    interval, which stays finite for points with zero failures.
    """
    if len(points) < 3:
        raise FitError("need at least 3 points")
    if not any(pt.failures for pt in points):
        raise FitError("no failures at any grid point, so A and B are unconstrained")
    p = np.array([pt.p for pt in points], dtype=float)
    y = np.array([pt.p_log for pt in points], dtype=float)
    sd = np.array([(pt.ci_high - pt.ci_low) / (2 * Z95) for pt in points])
    if not np.all(np.isfinite(sd)) or np.any(sd <= 0):
        raise FitError("every point needs a finite, nonzero interval")
    X = np.stack([p, p * p], axis=1) / sd[:, None]
    if np.linalg.matrix_rank(X) < 2:
        raise FitError("design matrix is degenerate (need distinct nonzero p values)")
    # scale columns so nnls sees comparable magnitudes
    scale = np.linalg.norm(X, axis=0)
    coef, _ = nnls(X / scale, y / sd)
    A, B = coef / scale
    return FitResult(float(A), float(B), threshold_from(float(A), float(B)))


def is_monotone(points: list[RateEstimate]) -> bool:
    """p_log non-decreasing in p, allowing overlap of the 95% intervals."""
    pts = sorted(points, key=lambda r: r.p)
    return all(b.ci_high >= a.ci_low for a, b in zip(pts, pts[1:]))
