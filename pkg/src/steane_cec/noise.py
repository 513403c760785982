"""Per-location Pauli noise: the error model, fault sampling and enumeration.

Every fault site fails independently with probability ``p`` and then applies
a Pauli drawn uniformly from the site's admissible nontrivial Paulis, just
after the gate. Idle qubits, one-qubit gates and CNOTs are one site each.
Gates on more than two qubits depend on ``ErrorModel.multiqubit``:

``"perqubit"``  one single-qubit site per qubit of the gate (default)
``"uniform"``   one site over all ``4**k - 1`` Paulis of the support
``"local"``     one site; the Pauli touches the ancilla(s) and at most one
                data qubit
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator

import numpy as np

from .circuit import Circuit, FaultLocation, enumerate_locations
from .pauli import N_QUBITS, PauliString
from .steane import N_DATA

ANCILLA_CHANNELS = ("full", "bitflip")
MULTIQUBIT_NOISE = ("perqubit", "uniform", "local")
_XZ = ((0, 0), (1, 0), (1, 1), (0, 1))  # I, X, Y, Z

# shots per independent random stream in batched sampling
CHUNK = 1 << 16


@dataclass(frozen=True)
class ErrorModel:
    """Physical error rate ``p`` (gate rate equals memory rate) and channel switches.

    ``ancilla_channel="bitflip"`` forbids any Z component on ancilla qubits
    and renormalizes over the remaining Paulis.
    """

    p: float
    ancilla_channel: str = "full"
    multiqubit: str = "perqubit"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.ancilla_channel not in ANCILLA_CHANNELS:
            raise ValueError(f"ancilla_channel must be one of {ANCILLA_CHANNELS}")
        if self.multiqubit not in MULTIQUBIT_NOISE:
            raise ValueError(f"multiqubit must be one of {MULTIQUBIT_NOISE}")

    def with_p(self, p: float) -> ErrorModel:
        return ErrorModel(p, self.ancilla_channel, self.multiqubit)


@dataclass(frozen=True)
class FaultEvent:
    location: int
    pauli: PauliString

    def __str__(self) -> str:
        return f"{self.location}:{self.pauli.to_literal()}"


@dataclass(frozen=True)
class FaultSite:
    index: int
    location: int
    support: tuple[int, ...]
    options: tuple[tuple[int, int], ...]  # admissible (x, z) words


@lru_cache(maxsize=4096)
def _admissible(support: tuple[int, ...], channel: str,
                max_data_weight: int) -> tuple[tuple[int, int], ...]:
    k = len(support)
    out = []
    for code in range(1, 4 ** k):
        x = z = 0
        data_weight = 0
        ok = True
        for j, q in enumerate(support):
            bx, bz = _XZ[(code >> 2 * (k - 1 - j)) & 3]
            if q >= N_DATA and bz and channel == "bitflip":
                ok = False
                break
            if q < N_DATA and (bx or bz):
                data_weight += 1
            x |= bx << q
            z |= bz << q
        if ok and data_weight <= max_data_weight:
            out.append((x, z))
    return tuple(out)


def site_supports(loc: FaultLocation, m: ErrorModel) -> list[tuple[int, ...]]:
    if len(loc.support) > 2 and m.multiqubit == "perqubit":
        return [(q,) for q in loc.support]
    return [loc.support]


def admissible_paulis(loc: FaultLocation, m: ErrorModel) -> tuple[tuple[int, int], ...]:
    """``(x, z)`` words a single fault at ``loc`` may apply, in stable order.

    Under ``"perqubit"`` noise on a multi-qubit gate this is the union over
    its per-qubit sites.
    """
    out: list[tuple[int, int]] = []
    for s in fault_sites_of(loc, m):
        out.extend(s.options)
    return tuple(out)


def fault_sites_of(loc: FaultLocation, m: ErrorModel, start: int = 0) -> list[FaultSite]:
    limit = 1 if (m.multiqubit == "local" and len(loc.support) > 2) else len(loc.support)
    return [FaultSite(start + k, loc.id, sup, _admissible(sup, m.ancilla_channel, limit))
            for k, sup in enumerate(site_supports(loc, m))]


def fault_sites(c: Circuit, m: ErrorModel,
                locations: list[FaultLocation] | None = None) -> list[FaultSite]:
    locs = enumerate_locations(c) if locations is None else locations
    out: list[FaultSite] = []
    for loc in locs:
        out.extend(fault_sites_of(loc, m, len(out)))
    return out


def sample_faults(c: Circuit, m: ErrorModel, rng: np.random.Generator,
                  sites: list[FaultSite] | None = None) -> list[FaultEvent]:
    """Draw the faults of one shot."""
    sites = fault_sites(c, m) if sites is None else sites
    if m.p == 0.0:
        return []
    hits = np.flatnonzero(rng.random(len(sites)) < m.p)
    out = []
    for i in hits:
        s = sites[i]
        x, z = s.options[rng.integers(len(s.options))]
        out.append(FaultEvent(s.location, PauliString(N_QUBITS, x, z)))
    return out


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    """Independent stream for shot ``shot`` of a run seeded with ``seed``."""
    return np.random.default_rng([seed, shot])


@dataclass
class SiteTable:
    """Flat numpy view of the fault sites, for batched sampling."""

    location: np.ndarray
    n_options: np.ndarray
    offset: np.ndarray
    x: np.ndarray
    z: np.ndarray

    @classmethod
    def build(cls, sites: list[FaultSite]) -> SiteTable:
        n_opt = np.array([len(s.options) for s in sites], dtype=np.int64)
        offset = np.concatenate([[0], np.cumsum(n_opt)[:-1]]).astype(np.int64)
        flat = [o for s in sites for o in s.options]
        return cls(
            location=np.array([s.location for s in sites], dtype=np.int64),
            n_options=n_opt,
            offset=offset,
            x=np.array([o[0] for o in flat], dtype=np.uint16),
            z=np.array([o[1] for o in flat], dtype=np.uint16),
        )


def sample_chunk(table: SiteTable, p: float, n_shots: int, rng: np.random.Generator):
    """Faults for ``n_shots`` shots: arrays ``(shot, location, x, z)``.

    Each (shot, site) cell fails independently with probability ``p``; hit
    cells are found by geometric skipping over the flattened cell index.
    """
    n_sites = len(table.n_options)
    total = n_shots * n_sites
    empty = (np.zeros(0, np.int64), np.zeros(0, np.int64),
             np.zeros(0, np.uint16), np.zeros(0, np.uint16))
    if p <= 0.0 or total == 0:
        return empty
    if p >= 1.0:
        cells = np.arange(total, dtype=np.int64)
    else:
        parts = []
        pos = -1
        block = max(16, int(total * p * 1.1) + 64)
        while True:
            gaps = rng.geometric(p, size=block)
            cand = pos + np.cumsum(gaps, dtype=np.int64)
            parts.append(cand[cand < total])
            if cand[-1] >= total:
                break
            pos = int(cand[-1])
        cells = np.concatenate(parts)
    shot = cells // n_sites
    site = cells % n_sites
    pick = (rng.random(len(site)) * table.n_options[site]).astype(np.int64)
    idx = table.offset[site] + pick
    return shot, table.location[site], table.x[idx], table.z[idx]


def enumerate_single_faults(c: Circuit, m: ErrorModel) -> Iterator[FaultEvent]:
    """Every (site, admissible Pauli) once, ordered by location id then site."""
    for s in fault_sites(c, m):
        for x, z in s.options:
            yield FaultEvent(s.location, PauliString(N_QUBITS, x, z))


@dataclass
class FaultPairs:
    """Fault pairs at distinct sites, all of them or a weighted subsample.

    In a subsample a site pair is drawn uniformly and each fault uniformly
    from its site's admissible set, so pairs are drawn in proportion to their
    probability under the error model. ``total`` counts all event pairs and
    ``site_pairs`` all unordered site pairs.
    """

    pairs: Iterator[tuple[FaultEvent, FaultEvent]]
    total: int
    site_pairs: int
    size: int
    exhaustive: bool

    @property
    def fraction(self) -> float:
        return self.size / self.total if self.total else 0.0


def sample_pair_keys(sites: list[FaultSite], budget: int, seed: int) -> np.ndarray:
    """``budget`` distinct ``(site_i, option_a, site_j, option_b)`` rows, ``i < j``."""
    rng = np.random.default_rng([seed, 0x5A1])
    n = len(sites)
    n_opt = np.array([len(s.options) for s in sites], dtype=np.int64)
    rows = np.zeros((0, 4), dtype=np.int64)
    while len(rows) < budget:
        k = budget - len(rows)
        i = rng.integers(n, size=k)
        j = rng.integers(n - 1, size=k)
        j = j + (j >= i)
        i, j = np.minimum(i, j), np.maximum(i, j)
        a = (rng.random(k) * n_opt[i]).astype(np.int64)
        b = (rng.random(k) * n_opt[j]).astype(np.int64)
        new = np.stack([i, a, j, b], axis=1)
        rows = np.concatenate([rows, new])
        _, first = np.unique(rows, axis=0, return_index=True)
        rows = rows[np.sort(first)]
    return rows[:budget]


def enumerate_fault_pairs(c: Circuit, m: ErrorModel, budget: int | str = "all",
                          seed: int = 0) -> FaultPairs:
    """Unordered fault pairs at distinct fault sites.

    ``budget="all"`` yields every pair lazily; an integer draws that many
    distinct pairs from a stream fixed by ``seed``.
    """
    sites = fault_sites(c, m)
    sizes = [len(s.options) for s in sites]
    s1 = sum(sizes)
    total = (s1 * s1 - sum(n * n for n in sizes)) // 2
    n_site_pairs = math.comb(len(sites), 2)

    def ev(i, k):
        x, z = sites[i].options[k]
        return FaultEvent(sites[i].location, PauliString(N_QUBITS, x, z))

    if budget == "all":
        def gen():
            for i, j in combinations(range(len(sites)), 2):
                for a in range(sizes[i]):
                    for b in range(sizes[j]):
                        yield ev(i, a), ev(j, b)
        return FaultPairs(gen(), total, n_site_pairs, total, True)
    budget = int(budget)
    if not 0 < budget <= total:
        raise ValueError(f"budget must lie in 1..{total}")
    keys = sample_pair_keys(sites, budget, seed)
    return FaultPairs(((ev(i, a), ev(j, b)) for i, a, j, b in keys.tolist()),
                      total, n_site_pairs, budget, False)
