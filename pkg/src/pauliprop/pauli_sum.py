"""Weighted sums of Pauli strings backed by a hash map."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Union

from .pauli_bits import from_symbols, to_symbols, weight, word_bits


class PathCoefficient:
    """A real coefficient that also records how its path branched.

    ``ncos``/``nsin`` count cosine and sine factors picked up at branching
    rotations; ``pathweight`` is the accumulated Pauli weight.  When two
    paths merge the value is summed and the counters of the structurally
    smallest contributor (fewest branchings, then fewest sines, then least
    path weight) are kept.  The rule never looks at the value, so the
    surviving term set does not depend on the circuit parameters.
    """

    __slots__ = ("value", "ncos", "nsin", "pathweight")

    def __init__(self, value: float, ncos: int = 0, nsin: int = 0, pathweight: int = 0):
        self.value = value
        self.ncos = ncos
        self.nsin = nsin
        self.pathweight = pathweight

    @property
    def freq(self) -> int:
        return self.ncos + self.nsin

    def _key(self):
        return (self.ncos + self.nsin, self.nsin, self.pathweight)

    def merge(self, other: "PathCoefficient") -> "PathCoefficient":
        rep = self if self._key() <= other._key() else other
        return PathCoefficient(self.value + other.value, rep.ncos, rep.nsin, rep.pathweight)

    def scaled(self, factor: float) -> "PathCoefficient":
        return PathCoefficient(self.value * factor, self.ncos, self.nsin, self.pathweight)

    def __abs__(self) -> float:
        return abs(self.value)

    def __float__(self) -> float:
        return float(self.value)

    def __eq__(self, other) -> bool:
        if isinstance(other, PathCoefficient):
            return (self.value, self.ncos, self.nsin, self.pathweight) == (
                other.value, other.ncos, other.nsin, other.pathweight)
        return NotImplemented

    def __repr__(self) -> str:
        return (f"PathCoefficient({self.value!r}, ncos={self.ncos}, "
                f"nsin={self.nsin}, pathweight={self.pathweight})")


Coefficient = Union[float, PathCoefficient]


def coeff_value(c: Coefficient) -> float:
    return c.value if isinstance(c, PathCoefficient) else c


@dataclass(frozen=True)
class TruncationConfig:
    """Which propagated terms to drop after each gate.

    ``None`` disables a rule.  ``max_freq``, ``max_sins`` and
    ``max_pathweight`` need path-tracking coefficients.  ``custom`` receives
    ``(word, coefficient)`` and returns ``True`` to drop the term.
    """

    min_abs_coeff: float = 1e-10
    max_weight: Optional[int] = None
    max_freq: Optional[int] = None
    max_sins: Optional[int] = None
    max_pathweight: Optional[int] = None
    custom: Optional[Callable[[int, Coefficient], bool]] = None

    def __post_init__(self):
        if self.min_abs_coeff is None or self.min_abs_coeff < 0:
            raise ValueError("min_abs_coeff must be a non-negative number")
        for name in ("max_weight", "max_freq", "max_sins", "max_pathweight"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def needs_tracking(self) -> bool:
        return (self.max_freq is not None or self.max_sins is not None
                or self.max_pathweight is not None)

    @property
    def is_structural(self) -> bool:
        """True when no rule depends on coefficient values."""
        return self.min_abs_coeff == 0 and self.custom is None


NO_TRUNCATION = TruncationConfig(min_abs_coeff=0.0)


class PauliSum:
    """``sum_w c_w P_w`` over ``nqubits`` sites.

    Keys are bit-packed words (see :mod:`pauliprop.pauli_bits`).  Merging
    insertion evicts entries that cancel to exactly zero.
    """

    __slots__ = ("nqubits", "terms")

    def __init__(self, nqubits: int, terms: Optional[dict] = None):
        if nqubits < 1:
            raise ValueError("nqubits must be positive")
        self.nqubits = int(nqubits)
        self.terms: dict[int, Coefficient] = {} if terms is None else dict(terms)
        limit = 1 << (2 * self.nqubits)
        for w in self.terms:
            if not 0 <= w < limit:
                raise ValueError(f"word {w} does not fit {self.nqubits} qubits")

    @classmethod
    def from_word(cls, nqubits: int, w: int, coeff: Coefficient = 1.0) -> "PauliSum":
        return cls(nqubits, {w: coeff})

    @classmethod
    def from_symbols(cls, text: str, coeff: Coefficient = 1.0) -> "PauliSum":
        w, n = from_symbols(text)
        return cls(n, {w: coeff})

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, float]]) -> "PauliSum":
        out = None
        for sym, c in pairs:
            w, n = from_symbols(sym)
            if out is None:
                out = cls(n)
            elif n != out.nqubits:
                raise ValueError("inconsistent string lengths")
            out.add(w, float(c))
        if out is None:
            raise ValueError("cannot infer nqubits from an empty listing")
        return out

    @property
    def word_bits(self) -> int:
        return word_bits(self.nqubits)

    @property
    def is_tracked(self) -> bool:
        return any(isinstance(c, PathCoefficient) for c in self.terms.values())

    def _check_word(self, w: int) -> None:
        if w < 0 or w >> (2 * self.nqubits):
            raise ValueError(f"word {w} does not fit {self.nqubits} qubits")

    def add(self, w: int, c: Coefficient) -> "PauliSum":
        """Merge ``c`` into the coefficient of ``w``; returns ``self``."""
        self._check_word(w)
        terms = self.terms
        old = terms.get(w)
        if old is None:
            new = c
        elif isinstance(old, PathCoefficient):
            new = old.merge(c)
        else:
            new = old + c
        if coeff_value(new) == 0:
            terms.pop(w, None)
        else:
            terms[w] = new
        return self

    def add_sum(self, other: "PauliSum") -> "PauliSum":
        _check_same_size(self, other)
        for w, c in other.terms.items():
            self.add(w, c)
        return self

    def get_coeff(self, w: int) -> Coefficient:
        return self.terms.get(w, 0.0)

    def values(self) -> dict[int, float]:
        """Plain-float view of the coefficients."""
        return {w: coeff_value(c) for w, c in self.terms.items()}

    def copy(self) -> "PauliSum":
        return PauliSum(self.nqubits, self.terms)

    def scaled(self, factor: float) -> "PauliSum":
        return PauliSum(self.nqubits, {
            w: (c.scaled(factor) if isinstance(c, PathCoefficient) else c * factor)
            for w, c in self.terms.items()})

    def sorted_items(self) -> list[tuple[int, float]]:
        return sorted((w, coeff_value(c)) for w, c in self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[int, Coefficient]]:
        return iter(self.terms.items())

    def __contains__(self, w: int) -> bool:
        return w in self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.nqubits == other.nqubits and self.terms == other.terms

    def __repr__(self) -> str:
        shown = ", ".join(f"{to_symbols(w, self.nqubits)}: {c:.6g}"
                          for w, c in self.sorted_items()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"PauliSum({self.nqubits}, {{{shown}{more}}})"

    # serialization -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{to_symbols(w, self.nqubits)} {c:.17g}" for w, c in self.sorted_items()]
        return "\n".join([f"# nqubits {self.nqubits}"] + lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PauliSum":
        out = None
        nq = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "nqubits":
                    nq = int(parts[1])
                continue
            sym, val = line.split()
            w, n = from_symbols(sym)
            if out is None:
                out = cls(n if nq is None else nq)
            if n != out.nqubits:
                raise ValueError(f"line {raw!r}: expected {out.nqubits} symbols")
            out.add(w, float(val))
        if out is None:
            if nq is None:
                raise ValueError("empty Pauli sum listing without '# nqubits' header")
            out = cls(nq)
        return out

    def to_dict(self) -> dict:
        return {"nqubits": self.nqubits,
                "terms": [[to_symbols(w, self.nqubits), c] for w, c in self.sorted_items()]}

    @classmethod
    def from_dict(cls, data: dict) -> "PauliSum":
        out = cls(int(data["nqubits"]))
        for sym, c in data["terms"]:
            w, n = from_symbols(sym)
            if n != out.nqubits:
                raise ValueError(f"term {sym!r} has wrong length")
            out.add(w, float(c))
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PauliSum":
        return cls.from_dict(json.loads(text))


def _check_same_size(a: PauliSum, b: PauliSum) -> None:
    if a.nqubits != b.nqubits:
        raise ValueError(f"qubit count mismatch: {a.nqubits} vs {b.nqubits}")


def scalar_product(a: PauliSum, b: PauliSum) -> float:
    """``sum_w a_w b_w`` over shared words (no ``2**n`` factor)."""
    _check_same_size(a, b)
    small, big = (a.terms, b.terms) if len(a) <= len(b) else (b.terms, a.terms)
    total = 0.0
    for w, c in small.items():
        d = big.get(w)
        if d is not None:
            total += coeff_value(c) * coeff_value(d)
    return total


def norms(s: PauliSum) -> tuple[float, float, int]:
    """``(l1, l2 squared, number of terms)`` of the stored coefficients."""
    l1 = l2sq = 0.0
    for c in s.terms.values():
        v = coeff_value(c)
        l1 += abs(v)
        l2sq += v * v
    return l1, l2sq, len(s.terms)


def _drop_predicate(cfg: TruncationConfig, tracked: bool):
    if cfg.needs_tracking and not tracked:
        raise ValueError("frequency, sine or path-weight truncation needs path-tracking coefficients")
    rules = []
    if cfg.min_abs_coeff > 0:
        tau = cfg.min_abs_coeff
        rules.append(lambda w, c: abs(c) < tau)
    if cfg.max_weight is not None:
        k = cfg.max_weight
        rules.append(lambda w, c: weight(w) > k)
    if cfg.max_freq is not None:
        f = cfg.max_freq
        rules.append(lambda w, c: c.ncos + c.nsin > f)
    if cfg.max_sins is not None:
        s = cfg.max_sins
        rules.append(lambda w, c: c.nsin > s)
    if cfg.max_pathweight is not None:
        p = cfg.max_pathweight
        rules.append(lambda w, c: c.pathweight > p)
    if cfg.custom is not None:
        rules.append(cfg.custom)
    return rules


def truncate_terms(terms: dict, cfg: TruncationConfig, tracked: bool = False) -> tuple[float, float]:
    """Drop terms from ``terms`` in place; returns discarded ``(l1, l2sq)``."""
    rules = _drop_predicate(cfg, tracked)
    if not rules or not terms:
        return 0.0, 0.0
    if len(rules) == 1 and cfg.min_abs_coeff > 0 and not tracked:
        tau = cfg.min_abs_coeff
        doomed = [w for w, c in terms.items() if abs(c) < tau]
    else:
        doomed = [w for w, c in terms.items() if any(r(w, c) for r in rules)]
    l1 = l2sq = 0.0
    for w in doomed:
        v = coeff_value(terms.pop(w))
        l1 += abs(v)
        l2sq += v * v
    return l1, l2sq


def truncate(s: PauliSum, cfg: TruncationConfig, inplace: bool = False) -> tuple[PauliSum, float, float]:
    """Apply ``cfg`` to ``s``; returns ``(kept, discarded l1, discarded l2sq)``."""
    out = s if inplace else s.copy()
    tracked = out.is_tracked
    if cfg.needs_tracking and out.terms and not tracked:
        raise ValueError("frequency, sine or path-weight truncation needs path-tracking coefficients")
    l1, l2sq = truncate_terms(out.terms, cfg, tracked=tracked or not out.terms)
    return out, l1, l2sq


def l2_norm(s: PauliSum) -> float:
    return math.sqrt(norms(s)[1])
