"""Pauli operators modulo phase, stored in bit-packed binary symplectic form.

Qubit ``q`` (0-indexed) corresponds to bit ``q`` of the ``x`` and ``z`` words.
The text literal uses 1-indexed qubits, e.g. ``"Z1.Z2.Z3.Z4"``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

N_QUBITS = 14

_LETTER = {(1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {"X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_TOKEN = re.compile(r"^([XYZ])(\d+)$")


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, slots=True)
class PauliString:
    """A Pauli operator on ``n`` qubits, phase dropped.

    ``x`` and ``z`` are integers used as bit vectors: qubit ``q`` carries X
    iff bit ``q`` of ``x`` is set, Z iff bit ``q`` of ``z`` is set, Y iff both.
    """

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError(f"bits set outside of {self.n} qubits")

    @classmethod
    def identity(cls, n: int = N_QUBITS) -> PauliString:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliString:
        """Weight-1 Pauli ``letter`` on 0-indexed ``qubit``."""
        bx, bz = _BITS[letter]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_support(cls, n: int, qubits: Iterable[int], letter: str) -> PauliString:
        """Same Pauli letter on every 0-indexed qubit in ``qubits``."""
        bx, bz = _BITS[letter]
        mask = 0
        for q in qubits:
            mask |= 1 << q
        return cls(n, mask if bx else 0, mask if bz else 0)

    @classmethod
    def from_literal(cls, text: str, n: int = N_QUBITS) -> PauliString:
        """Parse ``"X1.Z3.Y14"`` (1-indexed) or ``"I"``."""
        text = text.strip()
        if text in ("I", ""):
            return cls(n)
        x = z = 0
        for tok in text.split("."):
            m = _TOKEN.match(tok)
            if m is None:
                raise ValueError(f"bad Pauli token {tok!r}")
            q = int(m.group(2)) - 1
            if not 0 <= q < n:
                raise ValueError(f"qubit {q + 1} out of range 1..{n}")
            if (x | z) >> q & 1:
                raise ValueError(f"qubit {q + 1} repeated in {text!r}")
            bx, bz = _BITS[m.group(1)]
            x |= bx << q
            z |= bz << q
        return cls(n, x, z)

    def to_literal(self) -> str:
        toks = [f"{self[q]}{q + 1}" for q in range(self.n) if (self.x | self.z) >> q & 1]
        return ".".join(toks) if toks else "I"

    def __getitem__(self, q: int) -> str:
        return _LETTER.get((self.x >> q & 1, self.z >> q & 1), "I")

    def __str__(self) -> str:
        return self.to_literal()

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    @property
    def support(self) -> tuple[int, ...]:
        bits = self.x | self.z
        return tuple(q for q in range(self.n) if bits >> q & 1)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def restrict(self, qubits: Iterable[int]) -> PauliString:
        """Keep only the components on ``qubits`` (same register size)."""
        mask = 0
        for q in qubits:
            mask |= 1 << q
        return PauliString(self.n, self.x & mask, self.z & mask)


def _check_sizes(p: PauliString, q: PauliString) -> None:
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n}")


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Pauli product modulo phase."""
    _check_sizes(p, q)
    return PauliString(p.n, p.x ^ q.x, p.z ^ q.z)


def symplectic(p: PauliString, q: PauliString) -> int:
    """Symplectic inner product: 0 if ``p`` and ``q`` commute, else 1."""
    _check_sizes(p, q)
    return _popcount((p.x & q.z) ^ (p.z & q.x)) & 1


def commutes(p: PauliString, q: PauliString) -> bool:
    return symplectic(p, q) == 0


def conjugate_through(p: PauliString, gate) -> PauliString:
    """Return ``g P g^dagger`` modulo phase for an H, CNOT or CPSTRING gate.

    ``gate`` is a :class:`steane_cec.circuit.GateOp`. Resets and classically
    controlled corrections are not Clifford conjugations and are rejected.
    """
    kind = gate.kind
    x, z = p.x, p.z
    if kind == "H":
        (q,) = gate.qubits
        bx, bz = x >> q & 1, z >> q & 1
        x ^= (bx ^ bz) << q
        z ^= (bx ^ bz) << q
        return PauliString(p.n, x, z)
    if kind == "CNOT":
        c, t = gate.qubits
        x ^= (x >> c & 1) << t
        z ^= (z >> t & 1) << c
        return PauliString(p.n, x, z)
    if kind == "CPSTRING":
        a = gate.qubits[0]
        body = gate.body
        # data part anticommuting with the body picks up Z on the control
        anti = _popcount((x & body.z) ^ (z & body.x)) & 1
        if x >> a & 1:
            x ^= body.x
            z ^= body.z
        z ^= anti << a
        return PauliString(p.n, x, z)
    raise ValueError(f"cannot conjugate through {kind}")
