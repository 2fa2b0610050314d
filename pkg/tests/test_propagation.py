import math

import numpy as np
import pytest

from helpers import random_circuit, random_sum, random_word
from pauliprop import (NO_TRUNCATION, Circuit, CliffordGate, PauliRotation, PauliSum, TruncationConfig,
                       count_paths, iter_layers, propagate, propagate_tracked)
from pauliprop.circuits import bricklayer_topology, tfi_trotter_circuit
from pauliprop.oracle import dense_expectation
from pauliprop.overlaps import overlap
from pauliprop.pauli_bits import from_symbols, weight
from propagation_fixtures import EXAMPLE_THETAS, two_qubit_example


def test_two_qubit_example():
    s, rep = propagate(two_qubit_example(), "ZI", EXAMPLE_THETAS, NO_TRUNCATION)
    expect = {"ZI": math.cos(0.3), "YI": math.sin(0.3) * math.cos(0.8), "XZ": -math.sin(0.3) * math.sin(0.8)}
    assert s.values() == pytest.approx({from_symbols(k)[0]: v for k, v in expect.items()}, abs=1e-15)
    assert rep.final_nterms == 3 and rep.cumulative_l1 == 0
    assert count_paths(two_qubit_example(), from_symbols("ZI")[0]) == 3


def test_empty_circuit():
    obs = PauliSum.from_symbols("XYZ", 0.5)
    s, _ = propagate(Circuit(3), obs)
    assert s == obs


def test_clifford_only_single_term():
    rng = np.random.default_rng(1)
    for _ in range(20):
        circ, th = random_circuit(rng, 4, 15, ["clifford"])
        s, _ = propagate(circ, (random_word(rng, 4), 0.7), th)
        assert len(s) == 1 and abs(next(iter(s.terms.values()))) == 0.7


def test_four_qubit_rotations_vs_oracle():
    rng = np.random.default_rng(2)
    circ, th = random_circuit(rng, 4, 12, ["rotation"])
    obs = PauliSum.from_symbols("ZIZI")
    s, _ = propagate(circ, obs, th, NO_TRUNCATION)
    assert overlap(s, "zero") == pytest.approx(dense_expectation(circ, th, obs), abs=1e-10)


def test_tracked_branches():
    circ = Circuit(1, [PauliRotation("X", [1])])
    s, _ = propagate_tracked(circ, "Z", [0.4], NO_TRUNCATION)
    cz, cy = s.get_coeff(3), s.get_coeff(2)
    assert (cz.ncos, cz.nsin) == (1, 0) and (cy.ncos, cy.nsin) == (0, 1)
    assert float(cz) == pytest.approx(math.cos(0.4))


def test_tracked_matches_plain():
    rng = np.random.default_rng(3)
    for _ in range(20):
        circ, th = random_circuit(rng, 4, 12)
        obs = random_sum(rng, 4, 2)
        a, _ = propagate(circ, obs, th, NO_TRUNCATION)
        b, _ = propagate_tracked(circ, obs, th, NO_TRUNCATION)
        assert b.values() == pytest.approx(a.values(), abs=1e-14)


def test_max_sins_zero_is_clifford_limit():
    rng = np.random.default_rng(4)
    for _ in range(20):
        circ, th = random_circuit(rng, 4, 12, ["clifford", "rotation"])
        obs = random_sum(rng, 4, 2)
        lim, _ = propagate(circ, obs, np.zeros(circ.nparams), NO_TRUNCATION)
        s, _ = propagate_tracked(circ, obs, np.zeros(circ.nparams),
                                 TruncationConfig(min_abs_coeff=0, max_sins=0))
        assert s.values() == pytest.approx(lim.values())


def test_count_paths_full_tree():
    m = 6
    # one RX per site on a Z string: every branch stays distinct
    circ = Circuit(m, [CliffordGate("SWAP", [1, 2])] + [PauliRotation("X", [i]) for i in range(1, m + 1)])
    zs = from_symbols("Z" * m)[0]
    assert count_paths(circ, zs) == 2 ** m
    assert len(propagate(circ, zs, np.full(m, 0.3), NO_TRUNCATION)[0]) == 2 ** m
    with pytest.raises(OverflowError):
        count_paths(circ, zs, max_paths=10)


def test_truncation_monotone_in_threshold():
    circ = tfi_trotter_circuit(bricklayer_topology(6), 6, 3, tilted=True)
    th = np.random.default_rng(5).uniform(-1, 1, circ.nparams)
    counts = [len(propagate(circ, "IIZIII", th, TruncationConfig(min_abs_coeff=t))[0])
              for t in (1e-1, 1e-2, 1e-3, 1e-4, 0.0)]
    assert counts == sorted(counts)


def test_max_weight_respected_and_report():
    circ = tfi_trotter_circuit(bricklayer_topology(6), 6, 3)
    th = np.full(circ.nparams, 0.4)
    s, rep = propagate(circ, "IIZIII", th, TruncationConfig(min_abs_coeff=0, max_weight=2))
    assert all(weight(w) <= 2 for w in s.terms)
    assert len(rep.gates) == len(circ) and rep.peak_nterms >= rep.final_nterms
    assert rep.cumulative_l1 > 0
    assert "cumulative_l1" in rep.to_text(per_gate=False)


def test_iter_layers_matches_full_circuit():
    top = bricklayer_topology(5)
    layer = tfi_trotter_circuit(top, 5, 1, tilted=True)
    th = list(np.random.default_rng(6).uniform(-1, 1, layer.nparams))
    for k, s, rep in iter_layers(layer, "IIXII", 3, th, NO_TRUNCATION):
        full, _ = propagate(tfi_trotter_circuit(top, 5, k, tilted=True), "IIXII", th * k, NO_TRUNCATION)
        assert s.values() == pytest.approx(full.values(), abs=1e-13)
        assert len(rep.gates) == k * len(layer)


def test_needs_tracking_guard_and_theta_count():
    with pytest.raises(ValueError):
        propagate(two_qubit_example(), "ZI", EXAMPLE_THETAS, TruncationConfig(max_freq=2))
    with pytest.raises(ValueError):
        propagate(two_qubit_example(), "ZI", [0.1])
    with pytest.raises(ValueError):
        propagate(two_qubit_example(), "ZII", EXAMPLE_THETAS)
