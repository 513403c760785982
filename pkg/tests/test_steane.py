from itertools import combinations, product

import numpy as np
import pytest

from steane_cec.pauli import N_QUBITS, PauliString, commutes, symplectic
from steane_cec.steane import (ANCILLAS, DATA, build_code, ideal_decode, in_stabilizer_group,
                               logical_class, syndrome_of)

P = PauliString.from_literal
CODE = build_code()


def _closure_by_subset_products(gens):
    """Brute force: XOR every nonempty subset of the generator supports."""
    out = set()
    for k in range(1, len(gens) + 1):
        for subset in combinations(gens, k):
            s = set()
            for g in subset:
                s ^= set(g)
            out.add(frozenset(s))
    return out


def test_generator_supports_are_hamming_rows():
    as_sets = [{q + 1 for q in s} for s in CODE.supports[:3]]
    assert as_sets == [{4, 5, 6, 7}, {2, 3, 6, 7}, {1, 3, 5, 7}]


def test_redundant_supports_are_the_closure_in_order():
    expected = [{4, 5, 6, 7}, {2, 3, 6, 7}, {1, 3, 5, 7}, {2, 3, 4, 5},
                {1, 3, 4, 6}, {1, 2, 5, 6}, {1, 2, 4, 7}]
    assert [{q + 1 for q in s} for s in CODE.supports] == expected
    brute = _closure_by_subset_products([{q + 1 for q in s} for s in CODE.supports[:3]])
    assert {frozenset(s) for s in expected} == brute


def test_every_qubit_in_four_supports():
    for q in DATA:
        containing = [i for i, s in enumerate(CODE.supports) if q in s]
        assert len(containing) == 4
        assert CODE.support_table[q] == tuple(containing)
    assert [{q + 1 for q in CODE.supports[i]} for i in CODE.support_table[0]] == [
        {1, 3, 5, 7}, {1, 3, 4, 6}, {1, 2, 5, 6}, {1, 2, 4, 7}]


def test_pairwise_support_intersections_are_two():
    for a, b in combinations(CODE.supports, 2):
        assert len(set(a) & set(b)) == 2


def test_code_commutation_structure():
    gens = CODE.z_generators + CODE.x_generators
    for a, b in combinations(gens, 2):
        assert commutes(a, b)
    assert not commutes(CODE.logical_x, CODE.logical_z)
    for g in gens:
        assert commutes(g, CODE.logical_x) and commutes(g, CODE.logical_z)
    assert CODE.logical_x.weight == 7 and CODE.logical_z.weight == 7


def test_redundant_set_closed_under_products():
    for sector in (CODE.z_redundant, CODE.x_redundant):
        members = set(sector)
        for a, b in product(sector, repeat=2):
            ab = a * b
            assert ab.is_identity() or ab in members


def test_syndrome_of_identity_is_zero():
    assert syndrome_of(PauliString.identity(), "Z") == (0,) * 7
    assert syndrome_of(PauliString.identity(), "X", "generators") == (0,) * 3


def test_single_x_error_lights_its_four_stabilizers():
    for q in DATA:
        syn = syndrome_of(PauliString.single(N_QUBITS, q, "X"), "Z")
        assert tuple(i for i, b in enumerate(syn) if b) == CODE.support_table[q]
        assert syndrome_of(PauliString.single(N_QUBITS, q, "X"), "X") == (0,) * 7


def test_syndrome_is_linear_over_random_pairs():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        x1, z1, x2, z2 = (int(v) for v in rng.integers(0, 128, size=4))
        a, b = PauliString(N_QUBITS, x1, z1), PauliString(N_QUBITS, x2, z2)
        for sector in "ZX":
            sa, sb, sab = syndrome_of(a, sector), syndrome_of(b, sector), syndrome_of(a * b, sector)
            assert sab == tuple(u ^ v for u, v in zip(sa, sb))


def test_two_error_syndrome_equals_a_third_qubits():
    # the mechanism behind the fig1 failure: two errors mimic a third
    s = [syndrome_of(PauliString.single(N_QUBITS, q, "X"), "Z") for q in DATA]
    for a, b in combinations(DATA, 2):
        total = tuple(u ^ v for u, v in zip(s[a], s[b]))
        assert total in s and s.index(total) not in (a, b)


def test_ideal_decode_examples():
    assert ideal_decode(P("Z5")) == P("Z5")
    for stab in CODE.z_redundant + CODE.x_redundant:
        assert ideal_decode(stab).is_identity()


def _weight_le1_corrections():
    yield PauliString.identity()
    for q in DATA:
        for letter in "XYZ":
            yield PauliString.single(N_QUBITS, q, letter)


def test_decoder_soundness_on_single_errors():
    for q in DATA:
        for letter in "XYZ":
            e = PauliString.single(N_QUBITS, q, letter)
            assert in_stabilizer_group(e * ideal_decode(e))


def test_decode_of_weight_two_is_a_minimum_weight_zero_syndrome_fix():
    e = P("X1.X2")
    c = ideal_decode(e)
    assert not any(syndrome_of(e * c, "Z", "generators") + syndrome_of(e * c, "X", "generators"))
    # exhaust weight <= 1 corrections: the fixes found have weight 1, like c
    fixes = [k for k in _weight_le1_corrections()
             if not any(syndrome_of(e * k, "Z", "generators") + syndrome_of(e * k, "X", "generators"))]
    assert fixes and min(k.weight for k in fixes) == c.weight == 1
    assert logical_class(e * c) in ("I", "X")


def _coset_oracle(e):
    """Logical class by enumerating stabilizer group x logical representatives."""
    gens = CODE.z_generators + CODE.x_generators
    group = set()
    for bits in product((0, 1), repeat=6):
        s = PauliString.identity()
        for b, g in zip(bits, gens):
            if b:
                s = s * g
        group.add(s)
    reps = {"I": PauliString.identity(), "X": CODE.logical_x, "Z": CODE.logical_z,
            "Y": CODE.logical_x * CODE.logical_z}
    for name, r in reps.items():
        if any(e == s * r for s in group):
            return name
    raise AssertionError("not in the normalizer")


@pytest.mark.parametrize("lit,cls", [("Z2.Z3.Z4.Z5", "I"), ("X1.X2.X3.X4.X5.X6.X7", "X"),
                                     ("X1.X2.X3", "X"), ("Z1.Z2.Z3", "Z"),
                                     ("Y1.Y2.Y3", "Y"), ("X4.X5.X6.X7", "I")])
def test_logical_class_examples_match_coset_oracle(lit, cls):
    e = P(lit)
    assert logical_class(e) == cls == _coset_oracle(e)


def test_logical_class_rejects_nonzero_syndrome():
    with pytest.raises(ValueError):
        logical_class(P("X1"))


def test_symplectic_with_ancilla_free_data():
    assert all(symplectic(CODE.logical_x, PauliString.single(N_QUBITS, a, "Z")) == 0
               for a in ANCILLAS)
