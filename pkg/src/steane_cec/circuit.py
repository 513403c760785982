"""Timed gate IR, the two error-correction round builders, fault locations
and a line-oriented text format.

A round has four quarters (extract bit-flip syndromes, correct them, extract
phase syndromes, correct them) that run strictly one after another. Inside a
quarter, gates come in *blocks*: gates of one block commute and may be
reordered, but never overtake an earlier-block gate sharing a qubit. The
greedy ASAP scheduler fills each timestep with every ready gate whose qubits
are still free, visiting candidates in block order, then stabilizer index,
then construction order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .pauli import N_QUBITS, PauliString
from .steane import ANCILLAS, DATA, N_ANCILLA, N_DATA, build_code

GATE_KINDS = ("PREP0", "H", "CNOT", "CPSTRING", "CKX_CLASSICAL", "RESET")
_ARITY = {"PREP0": 1, "H": 1, "RESET": 1, "CNOT": 2}


class CircuitParseError(ValueError):
    def __init__(self, lineno: int, token: str, msg: str):
        super().__init__(f"line {lineno}: {msg} (token {token!r})")
        self.lineno = lineno
        self.token = token


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple[int, ...]
    body: PauliString | None = None
    timestep: int = 0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in _ARITY and len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated qubit in {self.kind} {self.qubits}")
        if self.kind == "CPSTRING":
            if self.body is None or self.body.is_identity():
                raise ValueError("CPSTRING needs a nontrivial body")
            if self.qubits[1:] != self.body.support or self.qubits[0] in self.body.support:
                raise ValueError("CPSTRING qubits must be control followed by body support")
        elif self.body is not None:
            raise ValueError(f"{self.kind} takes no body")
        if self.kind == "CKX_CLASSICAL" and len(self.qubits) != 5:
            raise ValueError("CKX_CLASSICAL takes 4 controls and 1 target")

    @property
    def controls(self) -> tuple[int, ...]:
        if self.kind == "CKX_CLASSICAL":
            return self.qubits[:-1]
        return self.qubits[:1]

    @property
    def target(self) -> int:
        return self.qubits[-1]


@dataclass(frozen=True)
class Circuit:
    gates: tuple[GateOp, ...]
    depth: int
    label: str = ""
    n_data: int = N_DATA
    n_ancilla: int = N_ANCILLA

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_ancilla

    def moments(self) -> list[list[GateOp]]:
        """Gates grouped by timestep, ``depth`` lists."""
        out: list[list[GateOp]] = [[] for _ in range(self.depth)]
        for g in self.gates:
            out[g.timestep].append(g)
        return out

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)


@dataclass(frozen=True)
class FaultLocation:
    id: int
    kind: str  # "GATE" or "IDLE"
    timestep: int
    support: tuple[int, ...]
    gate_kind: str | None = None


@dataclass
class _Pending:
    kind: str
    qubits: tuple[int, ...]
    body: PauliString | None
    block: int
    quarter: int = 0
    order: int = field(default=0)


def _pack(gates: list[_Pending], t0: int) -> tuple[list[GateOp], int]:
    remaining = sorted(gates, key=lambda g: (g.block, g.order))
    # per qubit: blocks of gates not yet scheduled, to test readiness
    open_blocks: dict[int, list[int]] = {q: [] for q in range(N_QUBITS)}
    for g in remaining:
        for q in g.qubits:
            open_blocks[q].append(g.block)
    placed: list[GateOp] = []
    t = t0
    while remaining:
        busy: set[int] = set()
        newly: list[_Pending] = []
        left: list[_Pending] = []
        for g in remaining:
            free = busy.isdisjoint(g.qubits)
            if free and all(min(open_blocks[q]) == g.block for q in g.qubits):
                busy.update(g.qubits)
                newly.append(g)
            else:
                left.append(g)
        if not newly:
            raise RuntimeError("scheduler stalled")
        for g in newly:
            for q in g.qubits:
                open_blocks[q].remove(g.block)
            placed.append(GateOp(g.kind, g.qubits, g.body, t))
        remaining = left
        t += 1
    return placed, t


def schedule(pending: list[_Pending], label: str = "") -> Circuit:
    """Greedy ASAP packing, one quarter after another."""
    for i, g in enumerate(pending):
        g.order = i
    placed: list[GateOp] = []
    t = 0
    for quarter in sorted({g.quarter for g in pending}):
        ops, t = _pack([g for g in pending if g.quarter == quarter], t)
        placed.extend(ops)
    placed.sort(key=lambda g: (g.timestep, min(g.qubits)))
    return Circuit(tuple(placed), t, label)


class _Builder:
    def __init__(self):
        self.gates: list[_Pending] = []
        self.block = 0
        self.quarter = 0

    def next_quarter(self) -> None:
        self.quarter += 1

    def add(self, kind: str, qubits, body=None) -> None:
        self.gates.append(_Pending(kind, tuple(qubits), body, self.block, self.quarter))

    def layer(self, kind: str, qubits: Iterable[int]) -> None:
        """One block of single-qubit gates."""
        for q in qubits:
            self.add(kind, (q,))
        self.block += 1

    def extract_cnot(self) -> None:
        for i, sup in enumerate(build_code().supports):
            for q in sup:
                self.add("CNOT", (q, ANCILLAS[i]))
        self.block += 1

    def extract_cpstring(self, letter: str) -> None:
        for i, sup in enumerate(build_code().supports):
            body = PauliString.from_support(N_QUBITS, sup, letter)
            self.add("CPSTRING", (ANCILLAS[i],) + tuple(sup), body)
        self.block += 1

    def corrections(self) -> None:
        code = build_code()
        for q in DATA:
            self.add("CKX_CLASSICAL", code.ancillas_for(q) + (q,))
        self.block += 1


def build_fig1() -> Circuit:
    """Redundant extraction with data-controlled CNOTs into each ancilla.

    Quarter 1 prepares the ancillas and runs 28 CNOTs; quarter 2 applies the
    7 four-control X corrections and resets. Quarters 3 and 4 repeat this
    between transversal H layers on the data, so the same gates act on
    phase errors.
    """
    b = _Builder()
    b.layer("PREP0", ANCILLAS)
    b.extract_cnot()
    b.next_quarter()
    b.corrections()
    b.layer("RESET", ANCILLAS)
    b.next_quarter()
    b.layer("H", DATA)
    b.layer("PREP0", ANCILLAS)
    b.extract_cnot()
    b.next_quarter()
    b.corrections()
    b.layer("H", DATA)
    b.layer("RESET", ANCILLAS)
    return schedule(b.gates, "FIG1")


def build_fig2() -> Circuit:
    """Each stabilizer kicked back onto its ancilla by one controlled-Pauli-string.

    The phase half extracts with X-string bodies; its Z corrections reuse the
    X-correction gates between transversal H layers on the data.
    """
    b = _Builder()
    b.layer("PREP0", ANCILLAS)
    b.layer("H", ANCILLAS)
    b.extract_cpstring("Z")
    b.layer("H", ANCILLAS)
    b.next_quarter()
    b.corrections()
    b.layer("RESET", ANCILLAS)
    b.next_quarter()
    b.layer("PREP0", ANCILLAS)
    b.layer("H", ANCILLAS)
    b.extract_cpstring("X")
    b.layer("H", ANCILLAS)
    b.next_quarter()
    b.layer("H", DATA)
    b.corrections()
    b.layer("H", DATA)
    b.layer("RESET", ANCILLAS)
    return schedule(b.gates, "FIG2")


def build(name: str) -> Circuit:
    builders = {"fig1": build_fig1, "fig2": build_fig2}
    try:
        return builders[name.lower()]()
    except KeyError:
        raise ValueError(f"unknown circuit {name!r}; expected fig1 or fig2") from None


def enumerate_locations(c: Circuit) -> list[FaultLocation]:
    """Every gate and every idle (qubit, timestep), ordered by time then lowest qubit."""
    out: list[FaultLocation] = []
    for t, gates in enumerate(c.moments()):
        items: list[tuple[int, str, tuple[int, ...], str | None]] = []
        covered: set[int] = set()
        for g in gates:
            items.append((min(g.qubits), "GATE", g.qubits, g.kind))
            covered.update(g.qubits)
        for q in range(c.n_qubits):
            if q not in covered:
                items.append((q, "IDLE", (q,), None))
        for _, kind, support, gk in sorted(items, key=lambda it: it[0]):
            out.append(FaultLocation(len(out), kind, t, support, gk))
    return out


def extraction_windows(c: Circuit) -> dict[tuple[int, int], tuple[int, ...]]:
    """Timesteps of each ancilla's entangling gates, keyed by (ancilla, half).

    ``half`` is 0 for the bit-flip extraction and 1 for the phase extraction.
    """
    per_anc: dict[int, list[int]] = {a: [] for a in ANCILLAS}
    for g in sorted(c.gates, key=lambda g: g.timestep):
        if g.kind == "CNOT" and g.qubits[1] in per_anc:
            per_anc[g.qubits[1]].append(g.timestep)
        elif g.kind == "CPSTRING":
            per_anc[g.qubits[0]].append(g.timestep)
    out = {}
    for a, ts in per_anc.items():
        k = len(ts) // 2
        out[(a, 0)] = tuple(ts[:k])
        out[(a, 1)] = tuple(ts[k:])
    return out


def export_text(c: Circuit) -> str:
    lines = [f"# circuit {c.label or '-'} depth={c.depth}"]
    for g in sorted(c.gates, key=lambda g: (g.timestep, min(g.qubits))):
        line = f"t={g.timestep} {g.kind} " + " ".join(str(q + 1) for q in g.qubits)
        if g.body is not None:
            line += f" body={g.body.to_literal()}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def import_text(text: str) -> Circuit:
    """Parse the output of :func:`export_text`."""
    label, depth = "", None
    gates: list[GateOp] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 3 and parts[0] == "circuit" and parts[2].startswith("depth="):
                label = "" if parts[1] == "-" else parts[1]
                try:
                    depth = int(parts[2][6:])
                except ValueError:
                    raise CircuitParseError(lineno, parts[2], "bad depth") from None
            continue
        toks = line.split()
        if not toks[0].startswith("t="):
            raise CircuitParseError(lineno, toks[0], "expected t=<step>")
        try:
            t = int(toks[0][2:])
        except ValueError:
            raise CircuitParseError(lineno, toks[0], "bad timestep") from None
        if len(toks) < 2:
            raise CircuitParseError(lineno, line, "missing gate kind")
        kind = toks[1]
        if kind not in GATE_KINDS:
            raise CircuitParseError(lineno, kind, "unknown gate kind")
        qubits: list[int] = []
        body = None
        for tok in toks[2:]:
            if tok.startswith("body="):
                try:
                    body = PauliString.from_literal(tok[5:])
                except ValueError as err:
                    raise CircuitParseError(lineno, tok, str(err)) from None
                continue
            if not tok.isdigit() or not 1 <= int(tok) <= N_QUBITS:
                raise CircuitParseError(lineno, tok, "bad qubit index")
            qubits.append(int(tok) - 1)
        try:
            gates.append(GateOp(kind, tuple(qubits), body, t))
        except ValueError as err:
            raise CircuitParseError(lineno, line, str(err)) from None
    if depth is None:
        depth = max((g.timestep for g in gates), default=-1) + 1
    return Circuit(tuple(gates), depth, label)
