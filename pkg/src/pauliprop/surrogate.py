"""Compile Clifford + Pauli-rotation circuits into a reusable expression DAG.

Propagation is run once symbolically: each term's coefficient is a node of
a graph built from ``cos(theta_k)``, ``sin(theta_k)`` leaves, products and
signed sums.  Truncation uses only structural information (Pauli weight and
path counters), so the surviving terms are the same for every parameter
vector and the graph reproduces the truncated expectation exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .gates import CliffordGate, PauliRotation, _sine_sign
from .overlaps import as_stabilizer_state, stabilizer_masks, stabilizer_sign
from .pauli_bits import commutes, right_mask, weight
from .pauli_sum import NO_TRUNCATION, TruncationConfig
from .propagation import Circuit, _extractor, _placements, as_pauli_sum

CONST, COS, SIN, PROD, SUM = range(5)
KIND_NAMES = ("CONST", "COS", "SIN", "PROD", "SUM")
FORMAT = "pauliprop-surrogate"
VERSION = 1


class _Builder:
    """Hash-consing node store."""

    def __init__(self):
        self.kind: list[int] = []
        self.args: list = []
        self._index: dict = {}

    def _node(self, kind: int, args) -> int:
        key = (kind, args)
        i = self._index.get(key)
        if i is None:
            i = len(self.kind)
            self.kind.append(kind)
            self.args.append(args)
            self._index[key] = i
        return i

    def const(self, v: float) -> int:
        return self._node(CONST, float(v))

    def leaf(self, kind: int, slot: int) -> int:
        return self._node(kind, int(slot))

    def prod(self, a: int, b: int) -> int:
        if self.kind[a] == CONST and self.args[a] == 1.0:
            return b
        if self.kind[b] == CONST and self.args[b] == 1.0:
            return a
        return self._node(PROD, (a, b))

    @staticmethod
    def _combine(items) -> tuple:
        acc: dict[int, int] = {}
        for n, s in items:
            acc[n] = acc.get(n, 0) + s
        return tuple((n, s) for n, s in acc.items() if s)

    def sum(self, items: list[tuple[int, int]]) -> Optional[tuple[int, int]]:
        """Signed sum of ``(node, weight)`` items; returns ``(node, sign)`` or ``None`` if it cancels."""
        kids = self._combine(items)
        if not kids:
            return None
        if len(kids) == 1 and kids[0][1] in (1, -1):
            return kids[0]
        # canonical sign so that S and -S share a node
        if kids[0][1] < 0:
            return self._node(SUM, tuple((n, -s) for n, s in kids)), -1
        return self._node(SUM, kids), 1

    def root(self, items: list[tuple[int, int]]) -> int:
        kids = self._combine(items)
        if not kids:
            return self.const(0.0)
        if len(kids) == 1 and kids[0][1] == 1:
            return kids[0][0]
        return self._node(SUM, kids)


@dataclass(frozen=True)
class SurrogateGraph:
    """Immutable expression DAG; node ids are in topological order."""

    kinds: tuple[int, ...]
    args: tuple
    root: int
    nparams: int
    metadata: dict

    @property
    def nnodes(self) -> int:
        return len(self.kinds)

    @property
    def nedges(self) -> int:
        e = 0
        for k, a in zip(self.kinds, self.args):
            if k == PROD:
                e += 2
            elif k == SUM:
                e += len(a)
        return e

    def plan(self) -> "_Plan":
        p = self.__dict__.get("_plan")
        if p is None:
            p = _Plan(self)
            object.__setattr__(self, "_plan", p)
        return p

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        nodes = []
        for k, a in zip(self.kinds, self.args):
            if k == SUM:
                nodes.append([KIND_NAMES[k], [[n, s] for n, s in a]])
            elif k == PROD:
                nodes.append([KIND_NAMES[k], list(a)])
            else:
                nodes.append([KIND_NAMES[k], a])
        return {"format": FORMAT, "version": VERSION, "nparams": self.nparams,
                "root": self.root, "metadata": self.metadata, "nodes": nodes}

    @classmethod
    def from_dict(cls, data: dict) -> "SurrogateGraph":
        if data.get("format") != FORMAT:
            raise ValueError("not a surrogate graph file")
        if data.get("version") != VERSION:
            raise ValueError(f"unsupported surrogate format version {data.get('version')}")
        kinds, args = [], []
        nparams = int(data["nparams"])
        for i, (name, a) in enumerate(data["nodes"]):
            k = KIND_NAMES.index(name)
            if k == SUM:
                a = tuple((int(n), int(s)) for n, s in a)
                refs = [n for n, _ in a]
            elif k == PROD:
                a = (int(a[0]), int(a[1]))
                refs = list(a)
            elif k == CONST:
                a = float(a)
                refs = []
            else:
                a = int(a)
                refs = []
                if not 0 <= a < nparams:
                    raise ValueError(f"node {i}: slot {a} out of range")
            if any(not 0 <= r < i for r in refs):
                raise ValueError(f"node {i} references a later node")
            kinds.append(k)
            args.append(a)
        root = int(data["root"])
        if not 0 <= root < len(kinds):
            raise ValueError("root out of range")
        return cls(tuple(kinds), tuple(args), root, nparams, dict(data.get("metadata", {})))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "SurrogateGraph":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


class _Plan:
    """Level-by-level evaluation schedule over numpy arrays."""

    def __init__(self, g: SurrogateGraph):
        # restrict to the nodes the root depends on
        live = np.zeros(g.nnodes, bool)
        live[g.root] = True
        for i in range(g.nnodes - 1, -1, -1):
            if live[i]:
                k, a = g.kinds[i], g.args[i]
                if k == PROD:
                    live[a[0]] = live[a[1]] = True
                elif k == SUM:
                    for n, _ in a:
                        live[n] = True
        level = np.zeros(g.nnodes, int)
        for i in range(g.nnodes):
            k, a = g.kinds[i], g.args[i]
            if k == PROD:
                level[i] = 1 + max(level[a[0]], level[a[1]])
            elif k == SUM:
                level[i] = 1 + max(level[n] for n, _ in a)
        self.size = g.nnodes
        self.root = g.root
        ids = np.flatnonzero(live)
        kinds = np.array(g.kinds)
        self.consts = [(i, g.args[i]) for i in ids if kinds[i] == CONST]
        self.const_ids = np.array([i for i, _ in self.consts], int)
        self.const_vals = np.array([v for _, v in self.consts], float)
        self.cos_ids = np.array([i for i in ids if kinds[i] == COS], int)
        self.cos_slots = np.array([g.args[i] for i in self.cos_ids], int)
        self.sin_ids = np.array([i for i in ids if kinds[i] == SIN], int)
        self.sin_slots = np.array([g.args[i] for i in self.sin_ids], int)
        self.steps = []
        top = int(level[ids].max()) if len(ids) else 0
        for lv in range(1, top + 1):
            at = ids[level[ids] == lv]
            prods = [i for i in at if kinds[i] == PROD]
            sums = [i for i in at if kinds[i] == SUM]
            step = {}
            if prods:
                step["prod"] = (np.array(prods), np.array([g.args[i][0] for i in prods]),
                                np.array([g.args[i][1] for i in prods]))
            if sums:
                kids, w, starts = [], [], []
                for i in sums:
                    starts.append(len(kids))
                    for n, s in g.args[i]:
                        kids.append(n)
                        w.append(s)
                step["sum"] = (np.array(sums), np.array(kids), np.array(w, float), np.array(starts))
            self.steps.append(step)

    def run(self, thetas: np.ndarray) -> np.ndarray:
        """``thetas`` has shape ``(batch, nparams)``; returns root values of shape ``(batch,)``."""
        vals = np.empty((self.size, thetas.shape[0]))
        if len(self.const_ids):
            vals[self.const_ids] = self.const_vals[:, None]
        if len(self.cos_ids):
            vals[self.cos_ids] = np.cos(thetas[:, self.cos_slots]).T
        if len(self.sin_ids):
            vals[self.sin_ids] = np.sin(thetas[:, self.sin_slots]).T
        for step in self.steps:
            if "prod" in step:
                out, a, b = step["prod"]
                vals[out] = vals[a] * vals[b]
            if "sum" in step:
                out, kids, w, starts = step["sum"]
                vals[out] = np.add.reduceat(vals[kids] * w[:, None], starts, axis=0)
        return vals[self.root]


# --------------------------------------------------------------------------
# compilation


def _keep_rule(cfg: TruncationConfig):
    if cfg.min_abs_coeff > 0 or cfg.custom is not None:
        raise ValueError("surrogates support only structural truncation "
                         "(max_weight, max_freq, max_sins, max_pathweight); set min_abs_coeff=0")
    mw, mf, ms, mp = cfg.max_weight, cfg.max_freq, cfg.max_sins, cfg.max_pathweight

    def drop(w, t):
        return ((mw is not None and weight(w) > mw) or (mf is not None and t[2] + t[3] > mf)
                or (ms is not None and t[3] > ms) or (mp is not None and t[4] > mp))
    return drop


def _merge(b: _Builder, old: Optional[list], new: list) -> Optional[list]:
    """Merge term records ``[node, sign, ncos, nsin, pathweight]``."""
    if old is None:
        return new
    res = b.sum([(old[0], old[1]), (new[0], new[1])])
    if res is None:
        return None
    ko = (old[2] + old[3], old[3], old[4])
    kn = (new[2] + new[3], new[3], new[4])
    rep = old if ko <= kn else new
    return [res[0], res[1], rep[2], rep[3], rep[4]]


def compile_surrogate(circ: Circuit, observable, cfg: Optional[TruncationConfig] = None,
                      overlap="zero") -> SurrogateGraph:
    """Symbolically propagate ``observable`` and close it against a stabilizer product state."""
    cfg = NO_TRUNCATION if cfg is None else cfg
    drop = _keep_rule(cfg)
    n = circ.nqubits
    obs = as_pauli_sum(observable, n)
    state = as_stabilizer_state(overlap, n)
    for g in circ.gates:
        if not isinstance(g, (PauliRotation, CliffordGate)):
            raise ValueError(f"surrogates support only Clifford gates and Pauli rotations, got {g!r}")
    b = _Builder()
    slots = circ.slots()
    terms: dict[int, list] = {}
    for w, c in obs.terms.items():
        c = float(c)
        terms[w] = [b.const(abs(c)), 1 if c > 0 else -1, 0, 0, 0]

    for gate, slot in zip(reversed(circ.gates), reversed(slots)):
        if isinstance(gate, PauliRotation):
            g = gate.generator
            if slot is None:
                cnode, snode = b.const(math.cos(gate.theta)), b.const(math.sin(gate.theta))
            else:
                cnode, snode = b.leaf(COS, slot), b.leaf(SIN, slot)
            hits = [w for w in terms if not commutes(w, g)]
            new = {}
            for w in hits:
                t = terms[w]
                new[w ^ g] = [b.prod(t[0], snode), t[1] * _sine_sign(g, w), t[2], t[3] + 1, t[4]]
            for w in hits:
                t = terms[w]
                terms[w] = [b.prod(t[0], cnode), t[1], t[2] + 1, t[3], t[4]]
            for w, t in new.items():
                m = _merge(b, terms.get(w), t)
                if m is None:
                    terms.pop(w, None)
                else:
                    terms[w] = m
        else:
            ext = _extractor(gate.sites)
            keep, placed = _placements(gate.sites)
            out_, sign = gate.table.out, gate.table.sign
            res = {}
            for w, t in terms.items():
                sub = ext(w)
                t[1] *= sign[sub]
                res[(w & keep) | placed[out_[sub]]] = t
            terms = res
        for w, t in terms.items():
            t[4] += weight(w)
        for w in [w for w, t in terms.items() if drop(w, t)]:
            del terms[w]

    mr = right_mask(n)
    target, neg = stabilizer_masks(state)
    items = []
    for w in sorted(terms):
        sg = stabilizer_sign(w, target, neg, mr)
        if sg:
            items.append((terms[w][0], terms[w][1] * sg))
    root = b.root(items)
    meta = {
        "nqubits": n,
        "observable": obs.to_dict(),
        "overlap": state.to_string(),
        "truncation": {k: getattr(cfg, k) for k in ("max_weight", "max_freq", "max_sins", "max_pathweight")},
        "surviving_terms": len(terms),
    }
    return SurrogateGraph(tuple(b.kind), tuple(b.args), root, circ.nparams, meta)


def evaluate_surrogate(g: SurrogateGraph, thetas) -> Union[float, np.ndarray]:
    """Value at one parameter vector, or an array of values for a 2-D batch."""
    th = np.asarray(thetas, dtype=float)
    single = th.ndim == 1
    th = np.atleast_2d(th)
    if th.ndim != 2 or th.shape[1] != g.nparams:
        raise ValueError(f"expected {g.nparams} parameters per vector, got shape {np.shape(thetas)}")
    out = g.plan().run(th)
    return float(out[0]) if single else out
