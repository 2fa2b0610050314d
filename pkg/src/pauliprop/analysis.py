"""Error accounting, magic measures and the Monte Carlo mean-square-error estimator."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .gates import CliffordGate, PauliRotation
from .overlaps import as_stabilizer_state, stabilizer_masks, stabilizer_sign
from .pauli_bits import commutes, encode, right_mask, weight
from .pauli_sum import PauliSum, TruncationConfig, coeff_value, truncate
from .propagation import Circuit, PropagationReport, _extractor, _placements, as_pauli_sum, propagate


@dataclass
class ErrorLedger:
    """Discarded norms per truncation sweep."""

    discarded_l1: list[float] = field(default_factory=list)
    discarded_l2sq: list[float] = field(default_factory=list)

    @classmethod
    def from_report(cls, report: PropagationReport) -> "ErrorLedger":
        return cls(list(report.discarded_l1), list(report.discarded_l2sq))

    def __post_init__(self):
        if any(x < 0 for x in self.discarded_l1 + self.discarded_l2sq):
            raise ValueError("discarded norms must be non-negative")

    @property
    def cumulative_l1(self) -> float:
        """Worst-case bound on the expectation error."""
        return math.fsum(self.discarded_l1)

    @property
    def cumulative_l2sq(self) -> float:
        return math.fsum(self.discarded_l2sq)

    @property
    def l2_per_gate(self) -> list[float]:
        return [math.sqrt(x) for x in self.discarded_l2sq]

    @property
    def l2_bound(self) -> float:
        """Bound on the error of a two-point correlator ``2**-n Tr[Q E(P)]``."""
        return math.fsum(self.l2_per_gate)

    def to_text(self) -> str:
        return (f"delta_l1 {self.cumulative_l1:.17g}\n"
                f"discarded_l2sq {self.cumulative_l2sq:.17g}\n"
                f"l2_bound {self.l2_bound:.17g}\n")


def ledger_bound_check(exact: float, truncated: float, ledger: ErrorLedger, slack: float = 1e-12) -> bool:
    return abs(exact - truncated) <= ledger.cumulative_l1 + slack


def pauli_purity_and_ose(s: PauliSum) -> tuple[float, float, float]:
    """Return ``(P2, OSE, l1)`` of ``s`` rescaled to unit sum of squares."""
    vals = np.array([coeff_value(c) for c in s.terms.values()], dtype=float)
    norm2 = float(np.dot(vals, vals))
    if not len(vals) or norm2 == 0:
        raise ValueError("purity of an empty or zero sum is undefined")
    v = vals / math.sqrt(norm2)
    p2 = float(np.sum(v ** 4))
    l1 = float(np.sum(np.abs(v)))
    # l1 >= 1/sqrt(P2) always holds; allow for round-off
    assert l1 * math.sqrt(p2) >= 1 - 1e-9
    return p2, -math.log(p2), l1


# --------------------------------------------------------------------------
# Monte Carlo MSE


@dataclass(frozen=True)
class MCConfig:
    """Settings for :func:`mc_mse_estimate`.

    ``truncation`` defines the kept path set and may only use structural
    rules (``max_weight``, ``max_freq``, ``max_sins``, ``max_pathweight``).
    """

    nsamples: int = 1000
    seed: Optional[int] = 0
    truncation: TruncationConfig = TruncationConfig(min_abs_coeff=0.0)
    state: object = "zero"

    def __post_init__(self):
        if self.nsamples < 1:
            raise ValueError("nsamples must be at least 1")
        t = self.truncation
        if t.min_abs_coeff > 0 or t.custom is not None:
            raise ValueError("path membership needs parameter-free rules; set min_abs_coeff=0")


def _check_mc_circuit(circ: Circuit) -> None:
    for g in circ.gates:
        if isinstance(g, PauliRotation):
            if not g.parametrized:
                raise ValueError(f"{g!r} has a fixed angle; every rotation needs its own free parameter")
        elif not isinstance(g, CliffordGate):
            raise ValueError(f"Monte Carlo estimation supports Cliffords and rotations only, got {g!r}")


def mc_mse_estimate(circ: Circuit, observable: int, cfg: MCConfig = MCConfig()) -> tuple[float, float]:
    """Estimate the parameter-averaged squared truncation error.

    Angles are assumed independent and uniform on ``(-pi, pi)``.  Paths
    are sampled by walking the circuit backwards from ``observable`` and
    taking the cosine or sine branch with probability 1/2 at every
    anticommuting rotation.  A path that leaves the kept set contributes
    ``Tr[P rho]**2``.  Returns ``(mean, standard error)``.
    """
    _check_mc_circuit(circ)
    n = circ.nqubits
    state = as_stabilizer_state(cfg.state, n)
    rng = np.random.default_rng(cfg.seed)
    nrot = circ.nparams
    bits = rng.integers(0, 2, size=(cfg.nsamples, nrot), dtype=np.uint8)
    if n <= 31:
        g = _mc_walk_numpy(circ, int(observable), bits, cfg.truncation, state)
    else:
        g = _mc_walk_python(circ, int(observable), bits, cfg.truncation, state)
    mean = float(g.mean())
    se = float(g.std(ddof=1) / math.sqrt(len(g))) if len(g) > 1 else float("nan")
    return mean, se


def _violates(t: TruncationConfig, w_weight, ncos, nsin, pw):
    bad = False
    if t.max_weight is not None:
        bad = bad | (w_weight > t.max_weight)
    if t.max_freq is not None:
        bad = bad | (ncos + nsin > t.max_freq)
    if t.max_sins is not None:
        bad = bad | (nsin > t.max_sins)
    if t.max_pathweight is not None:
        bad = bad | (pw > t.max_pathweight)
    return bad


def _mc_walk_numpy(circ, obs, bits, trunc, state) -> np.ndarray:
    n = circ.nqubits
    ns = bits.shape[0]
    u = np.uint64
    mr = u(right_mask(n))
    w = np.full(ns, obs, dtype=np.uint64)
    ncos = np.zeros(ns, np.int64)
    nsin = np.zeros(ns, np.int64)
    pw = np.zeros(ns, np.int64)
    out = np.zeros(ns, bool)
    slot = circ.nparams
    for gate in reversed(circ.gates):
        if isinstance(gate, PauliRotation):
            slot -= 1
            gw = u(gate.generator)
            c = ((w & mr) & ((gw >> u(1)) & mr)) ^ ((gw & mr) & ((w >> u(1)) & mr))
            anti = (np.bitwise_count(c) & 1).astype(bool)
            take_sin = anti & (bits[:, slot] == 1)
            take_cos = anti & ~take_sin
            w = np.where(take_sin, w ^ gw, w)
            nsin += take_sin
            ncos += take_cos
        else:
            keep, placed = _placements(gate.sites)
            keep = u(keep & ((1 << (2 * n)) - 1))
            table = np.array([placed[t] for t in gate.table.out], dtype=np.uint64)
            sub = np.zeros(ns, np.uint64)
            for j, s in enumerate(gate.sites):
                sub |= ((w >> u(2 * (s - 1))) & u(3)) << u(2 * j)
            w = (w & keep) | table[sub.astype(np.int64)]
        wt = np.bitwise_count((w | (w >> u(1))) & mr).astype(np.int64)
        pw += wt
        out |= _violates(trunc, wt, ncos, nsin, pw)
    target, neg = stabilizer_masks(state)
    supp = (w | (w >> u(1))) & mr
    full = supp | (supp << u(1))
    nonzero = ((w ^ u(target)) & full) == 0
    return (out & nonzero).astype(float)


def _mc_walk_python(circ, obs, bits, trunc, state) -> np.ndarray:
    n = circ.nqubits
    mr = right_mask(n)
    target, neg = stabilizer_masks(state)
    gates = list(reversed(circ.gates))
    prepared = []
    slot = circ.nparams
    for gate in gates:
        if isinstance(gate, PauliRotation):
            slot -= 1
            prepared.append((0, gate.generator, slot))
        else:
            keep, placed = _placements(gate.sites)
            prepared.append((1, (_extractor(gate.sites), keep, placed, gate.table.out), None))
    res = np.zeros(bits.shape[0])
    for i in range(bits.shape[0]):
        w, ncos, nsin, pw, out = obs, 0, 0, 0, False
        row = bits[i]
        for kind, data, slot in prepared:
            if kind == 0:
                if not commutes(w, data):
                    if row[slot]:
                        w ^= data
                        nsin += 1
                    else:
                        ncos += 1
            else:
                ext, keep, placed, table = data
                w = (w & keep) | placed[table[ext(w)]]
            wt = weight(w)
            pw += wt
            out = out or bool(_violates(trunc, wt, ncos, nsin, pw))
        res[i] = 1.0 if out and stabilizer_sign(w, target, neg, mr) else 0.0
    return res


def theta_grid_mse(circ: Circuit, observable, max_weight: int, state="zero", points: int = 4,
                   exact=None) -> float:
    """Exact parameter-averaged squared error of weight truncation.

    For independent angles the error is a trigonometric polynomial of
    degree at most one in each angle, so its square has degree two and a
    uniform grid with ``points >= 3`` nodes per angle integrates it
    exactly.  ``exact(thetas)`` gives the untruncated expectation; the
    default is the dense oracle.
    """
    if points < 3:
        raise ValueError("need at least 3 grid points per angle")
    _check_mc_circuit(circ)
    if exact is None:
        from .oracle import dense_expectation
        obs_sum = as_pauli_sum(observable, circ.nqubits)
        exact = lambda th: dense_expectation(circ, th, obs_sum, state)  # noqa: E731
    from .overlaps import overlap
    st = as_stabilizer_state(state, circ.nqubits)
    cfg = TruncationConfig(min_abs_coeff=0.0, max_weight=max_weight)
    grid = -math.pi + 2 * math.pi * (np.arange(points) + 0.5) / points
    total = 0.0
    count = 0
    for th in itertools.product(grid, repeat=circ.nparams):
        s, _ = propagate(circ, observable, th, cfg)
        d = exact(th) - overlap(s, st)
        total += d * d
        count += 1
    return total / count


# --------------------------------------------------------------------------
# worst-case versus average-case toy examples


def _all_stabilizer_products(n: int):
    for combo in itertools.product([(3, 1), (3, -1), (1, 1), (1, -1), (2, 1), (2, -1)], repeat=n):
        yield [a for a, _ in combo], [s for _, s in combo]


def avg_case_toy_checks(n: int = 3) -> dict:
    """Reproduce the weight- and small-coefficient truncation toy examples exactly.

    Returns a dict with exact :class:`fractions.Fraction` values:
    ``weight_worst``, ``weight_average`` (expected ``3**-n``),
    ``coeff_worst``, ``coeff_mean_square`` and ``coeff_bound`` (``1/(n-1)``).
    The coefficient example needs ``n >= 3`` and is omitted for ``n = 2``.
    """
    if not 2 <= n <= 8:
        raise ValueError("exact enumeration supports 2 <= n <= 8")
    zall = encode(n, [(i, 3) for i in range(1, n + 1)])
    z1 = encode(n, [(1, 3)])
    mr = right_mask(n)

    # weight truncation: O = Z...Z + Z1, keep weight <= 2
    o = PauliSum(n, {zall: 1.0, z1: 1.0})
    kept, _, _ = truncate(o, TruncationConfig(min_abs_coeff=0.0, max_weight=min(2, n - 1)))
    diff = {w: Fraction(1) for w in o.terms if w not in kept.terms}

    def exact_overlap(terms, axes, signs):
        from .overlaps import ProductStabilizerState
        target, neg = stabilizer_masks(ProductStabilizerState(axes, signs))
        return sum(c * stabilizer_sign(w, target, neg, mr) for w, c in terms.items())

    weight_worst = abs(exact_overlap(diff, [3] * n, [1] * n))
    total = Fraction(0)
    for axes, signs in _all_stabilizer_products(n):
        total += abs(exact_overlap(diff, axes, signs))
    weight_average = total / 6 ** n

    out = {
        "n": n,
        "weight_worst": weight_worst,
        "weight_average": weight_average,
        "weight_average_expected": Fraction(1, 3 ** n),
    }
    if n < 3:
        # the cutoff must separate 1 from 1/(n-1), which needs n >= 3
        return out

    # small-coefficient truncation: O = Z1 + 1/(n-1) sum_{i>1} Z_i
    small = Fraction(1, n - 1)
    exact_terms = {z1: Fraction(1)}
    for i in range(2, n + 1):
        exact_terms[encode(n, [(i, 3)])] = small
    o2 = PauliSum(n, {w: float(c) for w, c in exact_terms.items()})
    tau = (1 + 1 / (n - 1)) / 2
    kept2, _, _ = truncate(o2, TruncationConfig(min_abs_coeff=tau))
    diff2 = {w: c for w, c in exact_terms.items() if w not in kept2.terms}
    coeff_worst = abs(exact_overlap(diff2, [3] * n, [1] * n))
    sq = Fraction(0)
    for bits in itertools.product([1, -1], repeat=n):
        sq += exact_overlap(diff2, [3] * n, list(bits)) ** 2
    coeff_mean_square = sq / 2 ** n
    coeff_bound = sum(c * c for c in diff2.values())  # Tr[(O-O')^2 I/2^n]
    out.update({
        "coeff_worst": coeff_worst,
        "coeff_mean_square": coeff_mean_square,
        "coeff_bound": coeff_bound,
        "coeff_bound_expected": Fraction(1, n - 1),
    })
    return out
