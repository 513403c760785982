"""Follow one ancilla phase error through both circuits.

In the CNOT circuit the error is copied onto two data qubits, the phase-half
correction then misfires and the round ends in a logical error. The same
error on the kickback circuit stays harmless.

    python notebooks/02_trace_back_action.py
"""

from steane_cec.circuit import build, enumerate_locations, extraction_windows
from steane_cec.engine import format_trace, run_round, trace_round
from steane_cec.noise import FaultEvent
from steane_cec.pauli import N_QUBITS, PauliString
from steane_cec.steane import ANCILLAS

anc = ANCILLAS[0]
z_anc = PauliString.single(N_QUBITS, anc, "Z")

c1 = build("fig1")
t_second = extraction_windows(c1)[(anc, 0)][1]
loc = next(l for l in enumerate_locations(c1) if l.timestep == t_second and anc in l.support)
fault = FaultEvent(loc.id, z_anc)
print(f"fig1: Z on qubit {anc + 1} after its second CNOT (location {loc.id})")
print(format_trace(trace_round(c1, [fault])), end="")
print("class:", run_round(c1, [fault]).cls)

c2 = build("fig2")
(t_kick,) = extraction_windows(c2)[(anc, 0)]
loc = next(l for l in enumerate_locations(c2) if l.timestep == t_kick and anc in l.support)
fault = FaultEvent(loc.id, z_anc)
print(f"\nfig2: Z on qubit {anc + 1} right after its kickback gate (location {loc.id})")
print("class:", run_round(c2, [fault]).cls)
