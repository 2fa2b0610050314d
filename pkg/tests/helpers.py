"""Random instance generators shared by the test modules."""

import math

from pauliprop import (AmplitudeDamping, Circuit, CliffordGate, PauliNoise, PauliRotation,
                       ProjectorZero, ProductStabilizerState, PauliSum, TGate)

ONE_QUBIT_CLIFFORDS = ["H", "X", "Y", "Z", "S"]
TWO_QUBIT_CLIFFORDS = ["CNOT", "CZ", "SWAP"]
KINDS = ["clifford", "rotation", "t", "depolarizing", "dephasing", "ampdamp", "projector"]


def random_sites(rng, n, k):
    return [int(s) + 1 for s in rng.choice(n, size=k, replace=False)]


def random_gate(rng, n, kinds=KINDS):
    kind = kinds[rng.integers(len(kinds))]
    two = n >= 2 and rng.random() < 0.5
    if kind == "clifford":
        if two:
            return CliffordGate(TWO_QUBIT_CLIFFORDS[rng.integers(3)], random_sites(rng, n, 2))
        return CliffordGate(ONE_QUBIT_CLIFFORDS[rng.integers(5)], random_sites(rng, n, 1))
    if kind == "rotation":
        k = int(rng.integers(1, min(n, 3) + 1))
        codes = [int(c) for c in rng.integers(1, 4, size=k)]
        return PauliRotation(codes, random_sites(rng, n, k))
    if kind == "t":
        return TGate(random_sites(rng, n, 1)[0])
    if kind in ("depolarizing", "dephasing"):
        k = 2 if two else 1
        return PauliNoise(kind, random_sites(rng, n, k), float(rng.uniform(0, 0.3)))
    if kind == "ampdamp":
        return AmplitudeDamping(random_sites(rng, n, 1)[0], float(rng.uniform(0.01, 1)))
    if kind == "projector":
        return ProjectorZero(random_sites(rng, n, 1)[0])
    raise ValueError(kind)


def random_circuit(rng, n, ngates, kinds=KINDS):
    circ = Circuit(n, [random_gate(rng, n, kinds) for _ in range(ngates)])
    thetas = rng.uniform(-math.pi, math.pi, size=circ.nparams)
    return circ, thetas


def random_word(rng, n):
    return int(sum(int(c) << (2 * i) for i, c in enumerate(rng.integers(0, 4, size=n))))


def random_sum(rng, n, nterms):
    s = PauliSum(n)
    for _ in range(nterms):
        s.add(random_word(rng, n), float(rng.normal()))
    return s


def random_stabilizer_state(rng, n):
    return ProductStabilizerState([int(a) for a in rng.integers(1, 4, size=n)],
                                  [int(s) for s in rng.choice([-1, 1], size=n)])


def random_bits(rng, n):
    return "".join(str(int(b)) for b in rng.integers(0, 2, size=n))
