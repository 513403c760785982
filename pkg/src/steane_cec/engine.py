"""Pauli-frame execution of one error-correction round.

The frame is the Pauli relating the faulty state to the noiseless reference
run. Clifford gates conjugate it. A four-control correction is resolved from
the actual ancilla bits: the reference keeps every ancilla in a computational
basis state holding the all-zero syndrome at correction time, so the actual
control bits equal the frame's X bits on the controls.

Two implementations share these semantics: :func:`run_round` on
:class:`PauliString` objects, and :class:`BatchEngine`, which runs many shots
at once on numpy bit-words.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import Circuit, FaultLocation, GateOp, enumerate_locations
from .noise import FaultEvent
from .pauli import N_QUBITS, PauliString, conjugate_through
from .steane import (ANCILLAS, DATA, DATA_MASK, LOGICAL_CLASSES, _bits_to_int, decode_bits,
                     ideal_decode, logical_class, syndrome_of)


@dataclass(frozen=True)
class RoundOutcome:
    residual: PauliString
    cls: str

    @property
    def failed(self) -> bool:
        return self.cls != "I"


def apply_gate(frame: PauliString, g: GateOp) -> PauliString:
    if g.kind in ("H", "CNOT", "CPSTRING"):
        return conjugate_through(frame, g)
    if g.kind in ("PREP0", "RESET"):
        (q,) = g.qubits
        keep = ~(1 << q)
        return PauliString(frame.n, frame.x & keep, frame.z & keep)
    if g.kind == "CKX_CLASSICAL":
        if all(frame.x >> a & 1 for a in g.controls):
            return PauliString(frame.n, frame.x ^ (1 << g.target), frame.z)
        return frame
    raise ValueError(f"unknown gate {g.kind}")


def _faults_by_step(c: Circuit, faults, locs: list[FaultLocation]) -> dict[int, list[FaultEvent]]:
    by_step: dict[int, list[FaultEvent]] = {}
    for f in faults:
        if not 0 <= f.location < len(locs):
            raise ValueError(f"unknown location id {f.location}")
        loc = locs[f.location]
        outside = f.pauli.support and not set(f.pauli.support) <= set(loc.support)
        if outside:
            raise ValueError(f"fault {f} acts outside location support {loc.support}")
        by_step.setdefault(loc.timestep, []).append(f)
    return by_step


def trace_round(c: Circuit, faults=(), inject: PauliString | None = None,
                locations: list[FaultLocation] | None = None) -> list[tuple[int, PauliString]]:
    """Frame before the round (t=-1) and after each timestep; ``depth + 1`` entries."""
    locs = enumerate_locations(c) if locations is None else locations
    frame = inject if inject is not None else PauliString.identity(N_QUBITS)
    if not frame.restrict(ANCILLAS).is_identity():
        raise ValueError("inject must act on data qubits only")
    by_step = _faults_by_step(c, faults, locs)
    snaps = [(-1, frame)]
    for t, gates in enumerate(c.moments()):
        for g in gates:
            frame = apply_gate(frame, g)
        for f in by_step.get(t, ()):
            frame = frame * f.pauli
        snaps.append((t, frame))
    return snaps


def classify(frame: PauliString) -> RoundOutcome:
    data = frame.restrict(DATA)
    residual = data * ideal_decode(data)
    return RoundOutcome(data, logical_class(residual))


def run_round(c: Circuit, faults=(), inject: PauliString | None = None,
              locations: list[FaultLocation] | None = None) -> RoundOutcome:
    """Execute one round and classify the data frame with an ideal decoder."""
    return classify(trace_round(c, faults, inject, locations)[-1][1])


def format_trace(snaps: list[tuple[int, PauliString]]) -> str:
    return "".join(f"t={t} frame={f.to_literal()}\n" for t, f in snaps)


# --- batched execution -------------------------------------------------------

@lru_cache(maxsize=None)
def _parity_table() -> np.ndarray:
    v = np.arange(1 << N_QUBITS, dtype=np.uint32)
    par = np.zeros_like(v)
    while v.any():
        par ^= v & 1
        v >>= 1
    return par.astype(np.uint16)


@lru_cache(maxsize=None)
def _decode_table() -> np.ndarray:
    """Residual class bit (parity of the corrected part) for each 7-bit data word."""
    out = []
    for word in range(1 << len(DATA)):
        e = PauliString(N_QUBITS, word, 0)
        corr = decode_bits(_bits_to_int(syndrome_of(e, "Z", "generators")))
        out.append(bin(word ^ corr).count("1") & 1)
    return np.array(out, dtype=np.uint8)


class BatchEngine:
    """Vectorized frame simulation of many shots of one circuit.

    Frames are two ``uint16`` arrays (X bits and Z bits, one word per shot).
    Faults are given as parallel arrays ``(shot, location, x, z)``.
    """

    def __init__(self, c: Circuit):
        self.circuit = c
        self.locations = enumerate_locations(c)
        self.loc_step = np.array([loc.timestep for loc in self.locations], dtype=np.int64)
        self.moments = c.moments()

    def run(self, n_shots: int, shot=None, loc=None, fx=None, fz=None,
            inject_x=None, inject_z=None) -> np.ndarray:
        """Logical class index (0=I, 1=X, 2=Z, 3=Y) per shot."""
        x, z = self.run_frames(n_shots, shot, loc, fx, fz, inject_x, inject_z)
        return self.classify(x, z)

    def run_frames(self, n_shots, shot=None, loc=None, fx=None, fz=None,
                   inject_x=None, inject_z=None):
        x = np.zeros(n_shots, dtype=np.uint16)
        z = np.zeros(n_shots, dtype=np.uint16)
        if inject_x is not None:
            x ^= np.asarray(inject_x, dtype=np.uint16)
        if inject_z is not None:
            z ^= np.asarray(inject_z, dtype=np.uint16)
        if shot is not None and len(shot):
            shot = np.asarray(shot, dtype=np.int64)
            step = self.loc_step[np.asarray(loc, dtype=np.int64)]
            order = np.argsort(step, kind="stable")
            shot, step = shot[order], step[order]
            fx = np.asarray(fx, dtype=np.uint16)[order]
            fz = np.asarray(fz, dtype=np.uint16)[order]
            bounds = np.searchsorted(step, np.arange(self.circuit.depth + 1))
        else:
            bounds = None
        par = _parity_table()
        for t, gates in enumerate(self.moments):
            for g in gates:
                self._apply(g, x, z, par)
            if bounds is not None and bounds[t] < bounds[t + 1]:
                sl = slice(bounds[t], bounds[t + 1])
                np.bitwise_xor.at(x, shot[sl], fx[sl])
                np.bitwise_xor.at(z, shot[sl], fz[sl])
        return x, z

    @staticmethod
    def _apply(g: GateOp, x: np.ndarray, z: np.ndarray, par: np.ndarray) -> None:
        k = g.kind
        if k == "H":
            b = np.uint16(1 << g.qubits[0])
            diff = (x ^ z) & b
            x ^= diff
            z ^= diff
        elif k == "CNOT":
            c, t = g.qubits
            x ^= ((x >> c) & 1) << t
            z ^= ((z >> t) & 1) << c
        elif k == "CPSTRING":
            a = g.qubits[0]
            bx, bz = np.uint16(g.body.x), np.uint16(g.body.z)
            anti = par[(x & bz) ^ (z & bx)]
            hit = ((x >> a) & 1).astype(bool)
            x[hit] ^= bx
            z[hit] ^= bz
            z ^= anti << a
        elif k in ("PREP0", "RESET"):
            keep = np.uint16(~(1 << g.qubits[0]) & 0xFFFF)
            x &= keep
            z &= keep
        elif k == "CKX_CLASSICAL":
            cm = 0
            for a in g.controls:
                cm |= 1 << a
            cm = np.uint16(cm)
            fire = ((x & cm) == cm).astype(np.uint16)
            x ^= fire << g.target
        else:
            raise ValueError(f"unknown gate {k}")

    @staticmethod
    def classify(x: np.ndarray, z: np.ndarray) -> np.ndarray:
        table = _decode_table()
        has_x = table[x & DATA_MASK]
        has_z = table[z & DATA_MASK]
        return has_x + 2 * has_z


def class_name(index: int) -> str:
    return LOGICAL_CLASSES[int(index)]
