"""Steane [[7,1,3]] code data: generators, the redundant 7+7 stabilizer set,
logical operators, syndromes and the ideal lookup decoder.

Data qubits are 0..6 (printed as 1..7) and ancillas 7..13 (printed 8..14).
Redundant stabilizer ``i`` is extracted into ancilla ``7 + i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .pauli import N_QUBITS, PauliString, symplectic

N_DATA = 7
N_ANCILLA = 7
DATA = tuple(range(N_DATA))
ANCILLAS = tuple(range(N_DATA, N_DATA + N_ANCILLA))
DATA_MASK = (1 << N_DATA) - 1

# rows of the [7,4] Hamming parity-check matrix, 0-indexed qubits
GENERATOR_SUPPORTS = ((3, 4, 5, 6), (1, 2, 5, 6), (0, 2, 4, 6))

LOGICAL_CLASSES = ("I", "X", "Z", "Y")


def _redundant_supports() -> tuple[tuple[int, ...], ...]:
    out = []
    # generators first, then products in lexicographic subset order
    subsets = [s for k in (1, 2, 3) for s in combinations(range(3), k)]
    for subset in subsets:
        mask = 0
        for g in subset:
            for q in GENERATOR_SUPPORTS[g]:
                mask ^= 1 << q
        out.append(tuple(q for q in range(N_DATA) if mask >> q & 1))
    return tuple(out)


@dataclass(frozen=True)
class CodeSpec:
    z_generators: tuple[PauliString, ...]
    x_generators: tuple[PauliString, ...]
    z_redundant: tuple[PauliString, ...]
    x_redundant: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    supports: tuple[tuple[int, ...], ...]
    support_table: tuple[tuple[int, ...], ...]

    def ancillas_for(self, qubit: int) -> tuple[int, ...]:
        """Ancillas holding the four stabilizers that contain data ``qubit``."""
        return tuple(ANCILLAS[i] for i in self.support_table[qubit])


@lru_cache(maxsize=None)
def build_code() -> CodeSpec:
    n = N_QUBITS
    supports = _redundant_supports()
    z_red = tuple(PauliString.from_support(n, s, "Z") for s in supports)
    x_red = tuple(PauliString.from_support(n, s, "X") for s in supports)
    table = tuple(
        tuple(i for i, s in enumerate(supports) if q in s) for q in range(N_DATA)
    )
    return CodeSpec(
        z_generators=z_red[:3],
        x_generators=x_red[:3],
        z_redundant=z_red,
        x_redundant=x_red,
        logical_x=PauliString.from_support(n, DATA, "X"),
        logical_z=PauliString.from_support(n, DATA, "Z"),
        supports=supports,
        support_table=table,
    )


def syndrome_of(e: PauliString, sector: str, redundancy: str = "redundant") -> tuple[int, ...]:
    """Syndrome bits of data error ``e``.

    ``sector="Z"`` measures the Z-type stabilizers (detects X components),
    ``sector="X"`` the X-type ones. ``redundancy`` picks the 3 generators or
    all 7 nontrivial elements of the sector.
    """
    code = build_code()
    if sector == "Z":
        stabs = code.z_redundant
    elif sector == "X":
        stabs = code.x_redundant
    else:
        raise ValueError(f"unknown sector {sector!r}")
    if redundancy == "generators":
        stabs = stabs[:3]
    elif redundancy != "redundant":
        raise ValueError(f"unknown redundancy {redundancy!r}")
    return tuple(symplectic(e, s) for s in stabs)


def _bits_to_int(bits) -> int:
    return sum(b << i for i, b in enumerate(bits))


@lru_cache(maxsize=None)
def _single_qubit_syndromes() -> dict[int, int]:
    """Generator syndrome (as int) of a weight-1 error on each data qubit."""
    n = N_QUBITS
    return {_bits_to_int(syndrome_of(PauliString.single(n, q, "X"), "Z", "generators")): q
            for q in DATA}


def decode_bits(syndrome: int) -> int:
    """Data-qubit mask of the weight <= 1 correction for a 3-bit generator syndrome."""
    if syndrome == 0:
        return 0
    return 1 << _single_qubit_syndromes()[syndrome]


def ideal_decode(e: PauliString) -> PauliString:
    """Minimum-weight correction ``C`` with ``syndrome(e * C) == 0``.

    X and Z components are decoded independently, as usual for a CSS code:
    each nonzero 3-bit generator syndrome names exactly one data qubit.
    """
    sz = _bits_to_int(syndrome_of(e, "Z", "generators"))
    sx = _bits_to_int(syndrome_of(e, "X", "generators"))
    return PauliString(e.n, decode_bits(sz), decode_bits(sx))


def logical_class(e: PauliString) -> str:
    """Coset of a zero-syndrome data Pauli: ``"I"``, ``"X"``, ``"Z"`` or ``"Y"``."""
    if any(syndrome_of(e, "Z", "generators")) or any(syndrome_of(e, "X", "generators")):
        raise ValueError(f"{e} has nonzero syndrome; decode it first")
    code = build_code()
    has_x = symplectic(e, code.logical_z)
    has_z = symplectic(e, code.logical_x)
    return LOGICAL_CLASSES[has_x + 2 * has_z]


def in_stabilizer_group(e: PauliString) -> bool:
    """True iff ``e`` (data part) is a product of the six generators."""
    zero_syn = not any(syndrome_of(e, "Z", "generators")) and not any(
        syndrome_of(e, "X", "generators"))
    return zero_syn and logical_class(e) == "I" and (e.restrict(ANCILLAS).is_identity())
