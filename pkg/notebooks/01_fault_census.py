"""Which single faults break each circuit?

Runs the exhaustive single-fault census for the three circuit/model pairs and
prints where the malignant faults sit in the data-controlled CNOT circuit.

    python notebooks/01_fault_census.py
"""

from collections import Counter

from steane_cec.analysis import fault_census
from steane_cec.circuit import build, enumerate_locations
from steane_cec.noise import ErrorModel

for name, channel in (("fig1", "full"), ("fig1", "bitflip"), ("fig2", "full")):
    census = fault_census(build(name), ErrorModel(0.0, channel))
    print(f"{name:5s} {channel:8s} A = {census.A:7.4f}  malignant events = {len(census.malignant)}")

# Only the CNOT circuit with phase noise on its ancillas has first-order
# failures. Every one of them puts a Z on an ancilla in the middle of its
# extraction, so the remaining CNOTs copy that Z onto two data qubits.
c = build("fig1")
census = fault_census(c, ErrorModel(0.0, "full"))
locs = enumerate_locations(c)
kinds = Counter(locs[lid].gate_kind or "idle" for lid in census.per_location)
print("\nmalignant locations by kind:", dict(kinds))
print(f"exact A = {census.A:.4f}, shortcut N_m*2/3 + N_g*8/15 = {census.shortcut_A:.4f}")

print("\nper extraction window (ancilla, half): CNOT share / idle share")
for (anc, half), shares in sorted(census.windows.items()):
    print(f"  ancilla {anc + 1:2d} half {half}: {shares['gate']:.4f} / {shares['idle']:.4f}")
