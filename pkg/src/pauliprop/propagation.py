"""Merging breadth-first propagation of Pauli sums through circuits.

Gates are applied last to first (Heisenberg picture).  After every gate the
produced terms are merged into one map and the truncation rules are swept
over it; the discarded weight is recorded in a :class:`PropagationReport`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

from .gates import CliffordGate, Gate, PauliNoise, PauliRotation, _sine_sign
from .pauli_bits import commutes, from_symbols, get_substring, weight
from .pauli_sum import PathCoefficient, PauliSum, TruncationConfig, truncate_terms


class Circuit:
    """Gates in Schrödinger order on ``nqubits`` sites.

    Rotations built without an angle are free parameters; they take slots
    ``0, 1, ...`` in the order they appear.
    """

    def __init__(self, nqubits: int, gates: Sequence[Gate] = ()):
        if nqubits < 1:
            raise ValueError("nqubits must be positive")
        self.nqubits = int(nqubits)
        self.gates: list[Gate] = []
        for g in gates:
            self.append(g)

    def append(self, gate: Gate) -> "Circuit":
        if max(gate.sites) > self.nqubits:
            raise ValueError(f"{gate!r} acts outside 1..{self.nqubits}")
        self.gates.append(gate)
        return self

    def extend(self, gates: Sequence[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    @property
    def nparams(self) -> int:
        return sum(1 for g in self.gates if g.parametrized)

    def slots(self) -> list[Optional[int]]:
        """Parameter slot of each gate, ``None`` for fixed gates."""
        out, k = [], 0
        for g in self.gates:
            if g.parametrized:
                out.append(k)
                k += 1
            else:
                out.append(None)
        return out

    def angles(self, thetas: Optional[Sequence[float]]) -> list[Optional[float]]:
        """Angle of every gate after binding ``thetas`` (``None`` for non-rotations)."""
        thetas = check_thetas(self, thetas)
        out = []
        for g, s in zip(self.gates, self.slots()):
            if s is not None:
                out.append(float(thetas[s]))
            else:
                out.append(g.theta if isinstance(g, PauliRotation) else None)
        return out

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __repr__(self) -> str:
        return f"Circuit({self.nqubits}, {len(self.gates)} gates, {self.nparams} params)"


def check_thetas(circ: Circuit, thetas) -> list[float]:
    n = circ.nparams
    if thetas is None:
        thetas = []
    thetas = [float(t) for t in thetas]
    if len(thetas) != n:
        raise ValueError(f"circuit has {n} parameter slots, got {len(thetas)} values")
    return thetas


@dataclass
class PropagationReport:
    """Per-gate bookkeeping, listed in application (reverse) order."""

    gates: list[str] = field(default_factory=list)
    discarded_l1: list[float] = field(default_factory=list)
    discarded_l2sq: list[float] = field(default_factory=list)
    nterms: list[int] = field(default_factory=list)
    initial_nterms: int = 0
    seconds: float = 0.0

    @property
    def final_nterms(self) -> int:
        return self.nterms[-1] if self.nterms else self.initial_nterms

    @property
    def peak_nterms(self) -> int:
        return max(self.nterms + [self.initial_nterms])

    @property
    def cumulative_l1(self) -> float:
        """Total discarded l1 norm, an upper bound on the expectation error."""
        return math.fsum(self.discarded_l1)

    @property
    def cumulative_l2sq(self) -> float:
        return math.fsum(self.discarded_l2sq)

    def extend(self, other: "PropagationReport") -> "PropagationReport":
        self.gates += other.gates
        self.discarded_l1 += other.discarded_l1
        self.discarded_l2sq += other.discarded_l2sq
        self.nterms += other.nterms
        self.seconds += other.seconds
        return self

    def to_text(self, per_gate: bool = True) -> str:
        lines = [
            f"initial_nterms {self.initial_nterms}",
            f"final_nterms {self.final_nterms}",
            f"peak_nterms {self.peak_nterms}",
            f"cumulative_l1 {self.cumulative_l1:.17g}",
            f"cumulative_l2sq {self.cumulative_l2sq:.17g}",
            f"seconds {self.seconds:.6f}",
        ]
        if per_gate:
            lines.append("# step gate nterms discarded_l1 discarded_l2sq")
            for i, (g, n, a, b) in enumerate(zip(self.gates, self.nterms,
                                                 self.discarded_l1, self.discarded_l2sq)):
                lines.append(f"{i} {g} {n} {a:.17g} {b:.17g}")
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# fast substring access


def _extractor(sites: tuple[int, ...]) -> Callable[[int], int]:
    if len(sites) == 1:
        s0 = 2 * (sites[0] - 1)
        return lambda w: (w >> s0) & 3
    if len(sites) == 2:
        s0, s1 = 2 * (sites[0] - 1), 2 * (sites[1] - 1)
        return lambda w: ((w >> s0) & 3) | (((w >> s1) & 3) << 2)
    return lambda w: get_substring(w, sites)


def _placements(sites: tuple[int, ...]) -> tuple[int, list[int]]:
    """``(keep mask, bits of local substring t placed at sites)``."""
    k = len(sites)
    clear = 0
    for s in sites:
        clear |= 3 << (2 * (s - 1))
    placed = []
    for t in range(4 ** k):
        b = 0
        for j, s in enumerate(sites):
            b |= ((t >> (2 * j)) & 3) << (2 * (s - 1))
        placed.append(b)
    return ~clear, placed


# --------------------------------------------------------------------------
# per-gate kernels on plain float maps


def _rotate(terms: dict, gate: PauliRotation, theta: float) -> dict:
    c_, s_ = math.cos(theta), math.sin(theta)
    g = gate.generator
    if gate.branch_sign is not None:
        ext, table = _extractor(gate.sites), gate.branch_sign
        hits = [(w, table[ext(w)]) for w in terms if table[ext(w)]]
    else:
        hits = [(w, _sine_sign(g, w)) for w in terms if not commutes(w, g)]
    if not hits:
        return terms
    new = {}
    if s_ != 0.0:
        for w, sg in hits:
            new[w ^ g] = terms[w] * s_ * sg
    if c_ == 0.0:
        for w, _ in hits:
            del terms[w]
    else:
        for w, _ in hits:
            terms[w] *= c_
    # union of the auxiliary map into the main one
    get = terms.get
    for w, v in new.items():
        old = get(w)
        if old is None:
            terms[w] = v
        else:
            v += old
            if v == 0.0:
                del terms[w]
            else:
                terms[w] = v
    return terms


def _clifford(terms: dict, gate: CliffordGate) -> dict:
    ext = _extractor(gate.sites)
    keep, placed = _placements(gate.sites)
    out_, sign = gate.table.out, gate.table.sign
    res = {}
    for w, c in terms.items():
        sub = ext(w)
        res[(w & keep) | placed[out_[sub]]] = c if sign[sub] > 0 else -c
    return res


def _noise(terms: dict, gate: PauliNoise) -> dict:
    ext = _extractor(gate.sites)
    fac = gate.factors
    dead = []
    for w, c in terms.items():
        f = fac[ext(w)]
        if f != 1.0:
            if f == 0.0:
                dead.append(w)
            else:
                terms[w] = c * f
    for w in dead:
        del terms[w]
    return terms


def _local_map(terms: dict, gate: Gate) -> dict:
    ext = _extractor(gate.sites)
    keep, placed = _placements(gate.sites)
    lmap = gate.local_map()
    res: dict = {}
    get = res.get
    for w, c in terms.items():
        base = w & keep
        for t, f in lmap[ext(w)]:
            w2 = base | placed[t]
            res[w2] = get(w2, 0.0) + c * f
    return {w: c for w, c in res.items() if c != 0.0}


def _apply_plain(terms: dict, gate: Gate, theta: Optional[float]) -> dict:
    if isinstance(gate, PauliRotation):
        return _rotate(terms, gate, theta)
    if isinstance(gate, CliffordGate):
        return _clifford(terms, gate)
    if isinstance(gate, PauliNoise):
        return _noise(terms, gate)
    return _local_map(terms, gate)


# --------------------------------------------------------------------------
# tracked kernels


def _merge_into(res: dict, w: int, c: PathCoefficient) -> None:
    old = res.get(w)
    if old is not None:
        c = old.merge(c)
    if c.value == 0.0:
        res.pop(w, None)
    else:
        res[w] = c


def _apply_tracked(terms: dict, gate: Gate, theta: Optional[float]) -> dict:
    if isinstance(gate, PauliRotation):
        c_, s_ = math.cos(theta), math.sin(theta)
        g = gate.generator
        hits = [w for w in terms if not commutes(w, g)]
        new = {}
        for w in hits:
            c = terms[w]
            new[w ^ g] = PathCoefficient(c.value * s_ * _sine_sign(g, w), c.ncos, c.nsin + 1, c.pathweight)
        for w in hits:
            c = terms[w]
            terms[w] = PathCoefficient(c.value * c_, c.ncos + 1, c.nsin, c.pathweight)
        for w, c in new.items():
            _merge_into(terms, w, c)
        for w in [w for w in hits if w in terms and terms[w].value == 0.0]:
            del terms[w]
        res = terms
    else:
        ext = _extractor(gate.sites)
        keep, placed = _placements(gate.sites)
        lmap = gate.local_map()
        res = {}
        for w, c in terms.items():
            base = w & keep
            for t, f in lmap[ext(w)]:
                _merge_into(res, base | placed[t], c.scaled(f))
    for w, c in res.items():
        c.pathweight += weight(w)
    return res


# --------------------------------------------------------------------------
# drivers


def as_pauli_sum(init, nqubits: Optional[int] = None) -> PauliSum:
    """Accept a PauliSum, a symbol string, a word, or a ``(word, coeff)`` pair."""
    if isinstance(init, PauliSum):
        out = init.copy()
    elif isinstance(init, str):
        w, n = from_symbols(init)
        out = PauliSum(n, {w: 1.0})
    elif isinstance(init, int):
        out = PauliSum(nqubits, {init: 1.0})
    else:
        w, c = init
        out = PauliSum(nqubits, {int(w): float(c)})
    if nqubits is not None and out.nqubits != nqubits:
        raise ValueError(f"observable has {out.nqubits} qubits, circuit has {nqubits}")
    return out


def _run(circ: Circuit, psum: PauliSum, thetas, cfg: TruncationConfig, tracked: bool,
         report: PropagationReport) -> PauliSum:
    angles = circ.angles(thetas)
    terms = psum.terms
    apply = _apply_tracked if tracked else _apply_plain
    t0 = time.perf_counter()
    for gate, theta in zip(reversed(circ.gates), reversed(angles)):
        terms = apply(terms, gate, theta)
        l1, l2sq = truncate_terms(terms, cfg, tracked=tracked)
        report.gates.append(_label(gate, theta))
        report.discarded_l1.append(l1)
        report.discarded_l2sq.append(l2sq)
        report.nterms.append(len(terms))
    report.seconds += time.perf_counter() - t0
    psum.terms = terms
    return psum


def _label(gate: Gate, theta) -> str:
    if isinstance(gate, PauliRotation):
        return f"R{gate.symbol}{list(gate.sites)}({theta:.6g})".replace(" ", "")
    name = getattr(gate, "name", type(gate).__name__)
    return f"{name}{list(gate.sites)}".replace(" ", "")


def _prepare(circ: Circuit, init, cfg: Optional[TruncationConfig], tracked: bool):
    cfg = TruncationConfig() if cfg is None else cfg
    if cfg.needs_tracking and not tracked:
        raise ValueError("frequency, sine or path-weight truncation needs propagate_tracked")
    psum = as_pauli_sum(init, circ.nqubits)
    if tracked:
        psum.terms = {w: (c if isinstance(c, PathCoefficient) else PathCoefficient(float(c)))
                      for w, c in psum.terms.items()}
    else:
        psum.terms = {w: float(c) for w, c in psum.terms.items()}
    return psum, cfg


def propagate(circ: Circuit, init, thetas: Optional[Sequence[float]] = None,
              cfg: Optional[TruncationConfig] = None) -> tuple[PauliSum, PropagationReport]:
    """Evolve ``init`` backwards through ``circ``; returns ``(sum, report)``.

    ``cfg`` defaults to ``TruncationConfig()`` (coefficients below 1e-10
    are dropped); pass ``NO_TRUNCATION`` for an exact run.
    """
    psum, cfg = _prepare(circ, init, cfg, tracked=False)
    report = PropagationReport(initial_nterms=len(psum))
    return _run(circ, psum, thetas, cfg, False, report), report


def propagate_tracked(circ: Circuit, init, thetas: Optional[Sequence[float]] = None,
                      cfg: Optional[TruncationConfig] = None) -> tuple[PauliSum, PropagationReport]:
    """Like :func:`propagate` but with :class:`PathCoefficient` values."""
    psum, cfg = _prepare(circ, init, cfg, tracked=True)
    report = PropagationReport(initial_nterms=len(psum))
    return _run(circ, psum, thetas, cfg, True, report), report


def iter_layers(layer: Circuit, init, nlayers: int, thetas: Optional[Sequence[float]] = None,
                cfg: Optional[TruncationConfig] = None, tracked: bool = False
                ) -> Iterator[tuple[int, PauliSum, PropagationReport]]:
    """Propagate through ``layer`` repeated ``nlayers`` times.

    Yields ``(k, sum, report)`` after each pass, where ``sum`` is the
    observable evolved through ``k`` copies of the layer and ``report``
    accumulates over all passes so far.  The yielded sum is live; copy it
    to keep it.
    """
    psum, cfg = _prepare(layer, init, cfg, tracked)
    report = PropagationReport(initial_nterms=len(psum))
    for k in range(1, nlayers + 1):
        psum = _run(layer, psum, thetas, cfg, tracked, report)
        yield k, psum, report


def count_paths(circ: Circuit, init: int, thetas: Optional[Sequence[float]] = None,
                max_paths: Optional[int] = 10 ** 8) -> int:
    """Number of leaves of the unmerged branching tree rooted at word ``init``.

    Every branch of every non-commuting rotation counts, regardless of the
    angle.  Identical words are tracked with multiplicities, which gives the
    exact leaf count without enumerating paths.  Raises ``OverflowError``
    once the count exceeds ``max_paths``.
    """
    if thetas is not None:
        check_thetas(circ, thetas)
    counts = {int(init): 1}
    for gate in reversed(circ.gates):
        if isinstance(gate, PauliRotation):
            g = gate.generator
            for w, m in list(counts.items()):
                if not commutes(w, g):
                    counts[w ^ g] = counts.get(w ^ g, 0) + m
        else:
            ext = _extractor(gate.sites)
            keep, placed = _placements(gate.sites)
            lmap = gate.local_map()
            res: dict = {}
            for w, m in counts.items():
                for t, _ in lmap[ext(w)]:
                    w2 = (w & keep) | placed[t]
                    res[w2] = res.get(w2, 0) + m
            counts = res
        if max_paths is not None and sum(counts.values()) > max_paths:
            raise OverflowError(f"path count exceeds {max_paths}")
    return sum(counts.values())
