"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.  Tolerances are pinned below.
"""

import math
import random
import statistics
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from helpers import random_bits, random_circuit, random_stabilizer_state, random_sum  # noqa: E402

from pauliprop import (NO_TRUNCATION, Circuit, PauliRotation, PauliSum, TruncationConfig,  # noqa: E402
                       commutes, count_paths, encode, from_symbols, get_pauli, iter_layers, overlap,
                       overlap_with_computational, overlap_with_pauli_sum, overlap_with_plus,
                       overlap_with_product_stabilizer, overlap_with_zero, pauli_product, propagate,
                       propagate_tracked, set_pauli, weight, xy_weight, yz_weight)
from pauliprop.analysis import (ErrorLedger, MCConfig, avg_case_toy_checks, ledger_bound_check,  # noqa: E402
                                mc_mse_estimate, theta_grid_mse)
from pauliprop.circuits import (bricklayer_topology, ising_angles, rectangle_topology,  # noqa: E402
                                tfi_trotter_circuit)
from pauliprop.oracle import dense_expectation, dense_heisenberg  # noqa: E402
from pauliprop.pauli_bits import to_symbols  # noqa: E402
from pauliprop.surrogate import compile_surrogate, evaluate_surrogate  # noqa: E402

# pinned tolerances
EXAMPLE_DISPLAY_TOL = 0.005
EXAMPLE_EXACT_TOL = 1e-12
EXAMPLE_RUNTIME_S = 1e-3
ORACLE_TOL = 1e-10
ORACLE_RUNTIME_S = 60.0
NORM_TOL = 1e-12
ISING_TOL = 0.01
ISING_RUNTIME_S = 300.0
MAGIC_RATIO = 2.0
SURROGATE_TOL = 1e-12
MC_SIGMAS = 3.0
MC_MIN_HITS = 95
SE_RATIO_TOL = 0.20


RESULTS = []


def _report(num, title, ok, detail):
    line = f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# 1 -------------------------------------------------------------------------

def test_criterion_01_worked_example():
    circ = Circuit(2, [PauliRotation("ZZ", [1, 2]), PauliRotation("X", [2]), PauliRotation("X", [1])])
    thetas = [-0.8, math.pi / 3, 0.3]
    s, _ = propagate(circ, "ZI", thetas, NO_TRUNCATION)
    got = {to_symbols(w, 2): c for w, c in s.terms.items()}
    exact = {"ZI": math.cos(0.3), "YI": math.sin(0.3) * math.cos(0.8), "XZ": -math.sin(0.3) * math.sin(0.8)}
    printed = {"ZI": 0.96, "YI": 0.21, "XZ": -0.21}
    oracle = dense_heisenberg(circ, thetas, PauliSum.from_symbols("ZI"))
    ok_terms = set(got) == set(exact) and len(got) == 3
    ok_print = ok_terms and all(abs(got[k] - printed[k]) <= EXAMPLE_DISPLAY_TOL for k in printed)
    ok_exact = ok_terms and all(abs(got[k] - exact[k]) <= EXAMPLE_EXACT_TOL for k in exact)
    ok_oracle = all(abs(oracle[from_symbols(k)[0]] - v) <= EXAMPLE_EXACT_TOL for k, v in exact.items())
    best = float("inf")
    for _ in range(50):
        t0 = time.perf_counter()
        propagate(circ, "ZI", thetas, NO_TRUNCATION)
        best = min(best, time.perf_counter() - t0)
    ok = ok_print and ok_exact and ok_oracle and best < EXAMPLE_RUNTIME_S
    _report(1, "worked two-qubit example", ok,
            f"terms={sorted(got)} printed-match={ok_print} exact-match={ok_exact} "
            f"oracle-match={ok_oracle} runtime={best * 1e6:.0f}us")


# 2 -------------------------------------------------------------------------

def test_criterion_02_oracle_equivalence():
    rng = np.random.default_rng(20261015)
    t0 = time.perf_counter()
    worst_coeff = 0.0
    worst_overlap = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        circ, thetas = random_circuit(rng, n, int(rng.integers(1, 13)))
        obs = random_sum(rng, n, int(rng.integers(1, 4)))
        s, _ = propagate(circ, obs, thetas, NO_TRUNCATION)
        dense = dense_heisenberg(circ, thetas, obs)
        ours = np.zeros(4 ** n)
        for w, c in s.terms.items():
            ours[w] = c
        worst_coeff = max(worst_coeff, float(np.max(np.abs(ours - dense))))

        bits = random_bits(rng, n)
        stab = random_stabilizer_state(rng, n)
        rho = random_sum(rng, n, 3)
        checks = [
            (overlap_with_zero(s), "zero"),
            (overlap_with_plus(s), "plus"),
            (overlap_with_computational(s, bits), bits),
            (overlap_with_product_stabilizer(s, stab), stab),
            (overlap_with_pauli_sum(rho, s), rho),
        ]
        for val, state in checks:
            worst_overlap = max(worst_overlap, abs(val - dense_expectation(circ, thetas, obs, state)))
    elapsed = time.perf_counter() - t0
    ok = worst_coeff <= ORACLE_TOL and worst_overlap <= ORACLE_TOL and elapsed < ORACLE_RUNTIME_S
    _report(2, "oracle equivalence", ok,
            f"max coeff err={worst_coeff:.2e} max overlap err={worst_overlap:.2e} time={elapsed:.1f}s")


# 3 -------------------------------------------------------------------------

_PROD = {  # (a, b) -> (c, power of i)
    (0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (0, 3): (3, 0),
    (1, 0): (1, 0), (1, 1): (0, 0), (1, 2): (3, 1), (1, 3): (2, 3),
    (2, 0): (2, 0), (2, 1): (3, 3), (2, 2): (0, 0), (2, 3): (1, 1),
    (3, 0): (3, 0), (3, 1): (2, 1), (3, 2): (1, 3), (3, 3): (0, 0),
}


def _sites(w, n):
    return [(w >> (2 * i)) & 3 for i in range(n)]


def _naive_product(a, b, n):
    out, k = 0, 0
    for i, (x, y) in enumerate(zip(_sites(a, n), _sites(b, n))):
        c, p = _PROD[(x, y)]
        out |= c << (2 * i)
        k += p
    return out, k % 4


def test_criterion_03_bit_kernels():
    rnd = random.Random(3)
    N = 100_000
    sizes = [rnd.randint(1, 128) for _ in range(N)]
    words = [rnd.getrandbits(2 * n) for n in sizes]
    others = [rnd.getrandbits(2 * n) for n in sizes]
    bad = {}

    def tally(name, cond):
        if not cond:
            bad[name] = bad.get(name, 0) + 1

    for n, a, b in zip(sizes, words, others):
        sa, sb = _sites(a, n), _sites(b, n)
        tally("weight", weight(a) == sum(x != 0 for x in sa))
        tally("xy_weight", xy_weight(a) == sum(x in (1, 2) for x in sa))
        tally("yz_weight", yz_weight(a) == sum(x in (2, 3) for x in sa))
        anti = sum(x != 0 and y != 0 and x != y for x, y in zip(sa, sb))
        tally("commutes", commutes(a, b) == (anti % 2 == 0))
        tally("pauli_product", pauli_product(a, b) == _naive_product(a, b, n))
        site = rnd.randint(1, n)
        code = rnd.randint(0, 3)
        w2 = set_pauli(a, site, code)
        ref = list(sa)
        ref[site - 1] = code
        tally("get/set", get_pauli(w2, site) == code and _sites(w2, n) == ref
              and get_pauli(a, site) == sa[site - 1])
    zyx = from_symbols("ZYX")[0]
    tally("literal ZYX=27", zyx == 27 and encode(3, [(1, "Z"), (2, "Y"), (3, "X")]) == 27)
    prod, k = pauli_product(from_symbols("XY")[0], from_symbols("ZI")[0])
    tally("literal XY*ZI=-iYY", to_symbols(prod, 2) == "YY" and k == 3)
    ok = not bad
    _report(3, "bit-kernel exactness", ok,
            f"{N} words x 6 kernels (n in 1..128), mismatches={bad or 0}")


# 4 -------------------------------------------------------------------------

def test_criterion_04_conservation_and_bound():
    rng = np.random.default_rng(4)
    worst_norm = 0.0
    bound_fail = 0
    tightest = float("inf")
    for trial in range(100):
        n = int(rng.integers(2, 5))
        circ, thetas = random_circuit(rng, n, 12, ["clifford", "rotation", "t"])
        obs = random_sum(rng, n, 3)
        s, _ = propagate(circ, obs, thetas, NO_TRUNCATION)
        before = sum(c * c for c in obs.terms.values())
        after = sum(c * c for c in s.terms.values())
        worst_norm = max(worst_norm, abs(before - after))

        noisy, th2 = random_circuit(rng, n, 12)
        cfg = TruncationConfig(min_abs_coeff=float(rng.uniform(0.01, 0.3)),
                               max_weight=int(rng.integers(1, n + 1)))
        state = random_stabilizer_state(rng, n) if trial % 2 else "zero"
        st, rep = propagate(noisy, obs, th2, cfg)
        exact = dense_expectation(noisy, th2, obs, state)
        ledger = ErrorLedger.from_report(rep)
        if not ledger_bound_check(exact, overlap(st, state), ledger):
            bound_fail += 1
        tightest = min(tightest, ledger.cumulative_l1 - abs(exact - overlap(st, state)))

    toy_ok = True
    for n in range(2, 7):
        r = avg_case_toy_checks(n)
        toy_ok &= r["weight_worst"] == 1 and r["weight_average"] == r["weight_average_expected"]
        if n >= 3:
            toy_ok &= (r["coeff_worst"] == 1 and r["coeff_mean_square"] == r["coeff_bound_expected"]
                       and r["coeff_bound"] == r["coeff_bound_expected"])
    ok = worst_norm <= NORM_TOL and bound_fail == 0 and toy_ok
    _report(4, "conservation and truncation bound", ok,
            f"max |dsum c^2|={worst_norm:.1e} bound violations={bound_fail}/100 "
            f"min slack={tightest:.2e} toy cases n=2..6 exact={toy_ok}")


# 5 -------------------------------------------------------------------------

def test_criterion_05_merging():
    n = 8
    top = bricklayer_topology(n, periodic=True)
    rng = np.random.default_rng(5)
    ok = True
    rows = []
    for obs in ["ZIIIIIII", "IIIXIIII", "IYIIZIII"]:
        w = from_symbols(obs)[0]
        paths, terms = [], []
        for layers in range(1, 5):
            circ = tfi_trotter_circuit(top, n, layers, tilted=True)
            thetas = rng.uniform(-math.pi, math.pi, circ.nparams)
            s, _ = propagate(circ, obs, thetas, NO_TRUNCATION)
            paths.append(count_paths(circ, w, max_paths=None))
            terms.append(len(s))
            ok &= len(s) <= min(paths[-1], 4 ** n)
        ratios = [p / t for p, t in zip(paths, terms)]
        # strictly faster growth means the path/term ratio strictly increases
        ok &= all(b > a for a, b in zip(ratios, ratios[1:]))
        rows.append(f"{obs}: paths={paths} terms={terms}")
    _report(5, "merging effect", ok, "; ".join(rows))


# 6 -------------------------------------------------------------------------

def _ising_layer(rows, cols, tilted=True):
    top = rectangle_topology(rows, cols)
    layer = tfi_trotter_circuit(top, rows * cols, 1, tilted=tilted)
    return top, layer


def test_criterion_06_convergence_sweep():
    t0 = time.perf_counter()
    top, layer = _ising_layer(3, 3)
    dt, nlayers = 0.05, 10
    thetas = ising_angles(layer, dt, J=1.0, hx=1.05, hz=0.5)
    obs = PauliSum.from_symbols("IIIIZIIII")
    exact = []
    for k in range(1, nlayers + 1):
        circ = tfi_trotter_circuit(top, 9, k, tilted=True)
        exact.append(dense_expectation(circ, list(thetas) * k, obs))
    worst = {}
    for e in range(10, 19):
        cfg = TruncationConfig(min_abs_coeff=2.0 ** -e)
        errs = [abs(overlap(s, "zero") - exact[k - 1]) for k, s, _ in iter_layers(layer, obs, nlayers, thetas, cfg)]
        worst[e] = max(errs)
    elapsed = time.perf_counter() - t0
    inside = [worst[e] <= ISING_TOL for e in sorted(worst)]
    # once a threshold agrees at every layer, every finer one must as well
    suffix = all(inside[i:] == [True] * (len(inside) - i) for i in range(len(inside)) if inside[i])
    ok = worst[18] <= ISING_TOL and suffix and worst[18] <= worst[10] and elapsed < ISING_RUNTIME_S
    detail = " ".join(f"2^-{e}:{worst[e]:.1e}" for e in sorted(worst))
    _report(6, "convergence sweep", ok, f"max layer error {detail} time={elapsed:.1f}s")


# 7 -------------------------------------------------------------------------

def test_criterion_07_magic_separation():
    _, layer = _ising_layer(3, 3)
    obs = "IIIIZIIII"
    depths = range(2, 6)
    ok = True
    rows = []
    for tau in (1e-3, 1e-4, 1e-5):
        cfg = TruncationConfig(min_abs_coeff=tau)
        counts = {}
        for theta in (0.1, 0.5):
            th = [theta] * layer.nparams
            counts[theta] = [len(s) for k, s, _ in iter_layers(layer, obs, max(depths), th, cfg)
                             if k in depths]
        for th in counts:
            ok &= all(b >= a for a, b in zip(counts[th], counts[th][1:]))
        ok &= all(hi >= MAGIC_RATIO * lo for lo, hi in zip(counts[0.1], counts[0.5]))
        rows.append(f"tau={tau:g} 0.1->{counts[0.1]} 0.5->{counts[0.5]}")
    _report(7, "magic separation (depths 2-5)", ok, "; ".join(rows))


# 8 -------------------------------------------------------------------------

def test_criterion_08_surrogate():
    n = 10
    circ = tfi_trotter_circuit(bricklayer_topology(n), n, 5, tilted=True)
    cfg = TruncationConfig(min_abs_coeff=0.0, max_freq=12, max_weight=4)
    obs = "IIIIZIIIII"
    g = compile_surrogate(circ, obs, cfg)
    rng = np.random.default_rng(8)
    worst = 0.0
    t_sur, t_prop = [], []
    for _ in range(50):
        th = rng.uniform(-math.pi, math.pi, circ.nparams)
        t0 = time.perf_counter()
        v = evaluate_surrogate(g, th)
        t_sur.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        s, _ = propagate_tracked(circ, obs, th, cfg)
        ref = overlap(s, "zero")
        t_prop.append(time.perf_counter() - t0)
        worst = max(worst, abs(v - ref))
    ms, mp = statistics.mean(t_sur), statistics.mean(t_prop)
    ok = worst <= SURROGATE_TOL and ms < mp
    _report(8, "surrogate exactness and speed", ok,
            f"nodes={g.nnodes} max err={worst:.1e} eval={ms * 1e3:.2f}ms propagate={mp * 1e3:.2f}ms")


# 9 -------------------------------------------------------------------------

MC_CIRCUIT_SEEDS = (3, 30, 36, 113)


def _mc_circuit(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 5))
    circ, _ = random_circuit(rng, n, 8, ["clifford", "rotation"])
    assert 1 <= circ.nparams <= 3
    return circ, encode(n, [(1, "Z")])


def test_criterion_09_mc_estimator():
    hits = 0
    for i, seed in enumerate(MC_CIRCUIT_SEEDS):
        circ, obs = _mc_circuit(seed)
        exact = theta_grid_mse(circ, obs, max_weight=1)
        trunc = TruncationConfig(min_abs_coeff=0.0, max_weight=1)
        for trial in range(25):
            mean, se = mc_mse_estimate(circ, obs, MCConfig(1000, seed=100 * i + trial, truncation=trunc))
            hits += abs(mean - exact) <= MC_SIGMAS * se
    circ, obs = _mc_circuit(MC_CIRCUIT_SEEDS[1])
    trunc = TruncationConfig(min_abs_coeff=0.0, max_weight=1)
    ratios = []
    for trial in range(30):
        _, se1 = mc_mse_estimate(circ, obs, MCConfig(1000, seed=trial, truncation=trunc))
        _, se2 = mc_mse_estimate(circ, obs, MCConfig(2000, seed=1000 + trial, truncation=trunc))
        ratios.append(se2 / se1)
    ratio = statistics.mean(ratios)
    target = 1 / math.sqrt(2)
    ok = hits >= MC_MIN_HITS and abs(ratio - target) <= SE_RATIO_TOL * target
    _report(9, "Monte Carlo MSE estimator", ok,
            f"within 3 SE: {hits}/100, mean stderr ratio={ratio:.3f} (target {target:.3f} +-20%)")


# 10 ------------------------------------------------------------------------

def test_criterion_10_lightcone():
    n = 12
    top = bricklayer_topology(n)
    observables = ["IIIIIZIIIIII", "IIZIIIIIZIII", "IZIIZIIZIIZI"]
    rng = np.random.default_rng(10)
    ok = True
    rows = []
    for layers in (1, 2, 3):
        circ = tfi_trotter_circuit(top, n, layers)
        th = rng.uniform(-math.pi, math.pi, circ.nparams)
        counts = [len(propagate(circ, o, th)[0]) for o in observables]
        ok &= counts == sorted(counts)
        rows.append(f"layers={layers} counts(w=1,2,4)={counts}")
    _report(10, "lightcone ordering", ok, "; ".join(rows))


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
