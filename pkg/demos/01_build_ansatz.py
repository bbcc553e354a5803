#!/usr/bin/env python3
"""Build the three ansatz families and inspect their structure.

Each family takes a qubit count n and a repetition count L. Rotation
angles are symbolic; the number of symbols P is the trainable parameter
count.
"""

from vqclab import build_ansatz, circuit_to_text, dag_depth, gate_counts

FAMILIES = ["efficient_su2", "ttn", "real_amplitudes"]


def structure_table():
    print(f"{'ansatz':<18} {'n':>3} {'L':>3} {'P':>5} {'g1q':>5} {'g2q':>5} {'depth':>6}")
    print("-" * 50)
    for kind in FAMILIES:
        for n, reps in [(2, 1), (4, 1), (4, 3), (8, 2)]:
            c = build_ansatz(kind, n, reps)
            g1q, g2q = gate_counts(c)
            print(f"{kind:<18} {n:>3} {reps:>3} {c.num_symbols:>5} {g1q:>5} {g2q:>5} {dag_depth(c):>6}")
    print()


def show_text_format():
    print("TTN on 4 qubits, one repetition, in the circuit text format:")
    print(circuit_to_text(build_ansatz("ttn", 4, 1)))


if __name__ == "__main__":
    structure_table()
    show_text_format()
