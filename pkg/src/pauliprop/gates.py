"""Circuit operations and their Heisenberg action on single Pauli words.

Every gate acts on a handful of sites.  Apart from Pauli rotations, whose
output depends on an angle, each gate is reduced to a *local map*: a list
indexed by the packed substring on ``gate.sites`` whose entries are the
``(output substring, factor)`` pairs of the adjoint action.  The
propagation engine indexes into these lists directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence, Union

import numpy as np

from .pauli_bits import (SYMBOLS, commutes, encode, get_substring, pauli_product,
                         set_substring)

PAULI_MATRICES = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

_S2 = 1 / math.sqrt(2)
CLIFFORD_UNITARIES = {
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "X": PAULI_MATRICES[1],
    "Y": PAULI_MATRICES[2],
    "Z": PAULI_MATRICES[3],
    "S": np.diag([1, 1j]).astype(complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}

CLIFFORD_TOL = 1e-12
PTM_TOL = 1e-12


def pauli_matrix(sub: int, k: int) -> np.ndarray:
    """Dense matrix of a packed ``k``-site substring; the first site is the leftmost factor."""
    return reduce(np.kron, [PAULI_MATRICES[(sub >> (2 * j)) & 3] for j in range(k)])


def pauli_coefficients(op: np.ndarray, k: int) -> np.ndarray:
    """Coefficients ``Tr[P op] / 2**k`` for all ``4**k`` packed substrings."""
    return np.array([np.trace(pauli_matrix(s, k) @ op) / 2 ** k for s in range(4 ** k)])


def _check_sites(sites, nqubits: Optional[int] = None) -> tuple[int, ...]:
    sites = tuple(int(s) for s in sites)
    if not sites:
        raise ValueError("a gate needs at least one site")
    if len(set(sites)) != len(sites):
        raise ValueError(f"repeated site in {sites}")
    if min(sites) < 1 or (nqubits is not None and max(sites) > nqubits):
        raise ValueError(f"sites {sites} out of range")
    return sites


# --------------------------------------------------------------------------
# Clifford look-up tables


@dataclass(frozen=True)
class CliffordTable:
    arity: int
    out: tuple[int, ...]
    sign: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.out) != list(range(4 ** self.arity)):
            raise ValueError("Clifford table must be a bijection on substrings")

    def inverse(self) -> "CliffordTable":
        out = [0] * len(self.out)
        sign = [1] * len(self.out)
        for s, (t, g) in enumerate(zip(self.out, self.sign)):
            out[t] = s
            sign[t] = g
        return CliffordTable(self.arity, tuple(out), tuple(sign))

    def as_list(self) -> list[tuple[int, int]]:
        return list(zip(self.out, self.sign))


def build_clifford_table(k: int, spec: Union[str, np.ndarray]) -> CliffordTable:
    """Tabulate ``U^dagger P U`` for every ``k``-site Pauli ``P``.

    ``spec`` is a built-in name or a ``2**k`` square unitary.
    """
    if isinstance(spec, str):
        if spec not in CLIFFORD_UNITARIES:
            raise ValueError(f"unknown Clifford {spec!r}; pass a unitary instead")
        u = CLIFFORD_UNITARIES[spec]
    else:
        u = np.asarray(spec, dtype=complex)
    if u.shape != (2 ** k, 2 ** k):
        raise ValueError(f"expected a {2 ** k}x{2 ** k} matrix, got {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(2 ** k), atol=1e-10):
        raise ValueError("matrix is not unitary")
    out, sign = [], []
    for s in range(4 ** k):
        coeffs = pauli_coefficients(u.conj().T @ pauli_matrix(s, k) @ u, k)
        big = np.flatnonzero(np.abs(coeffs) > CLIFFORD_TOL)
        if len(big) != 1 or abs(abs(coeffs[big[0]]) - 1) > 1e-9 or abs(coeffs[big[0]].imag) > 1e-9:
            raise ValueError("matrix is not a Clifford: a conjugated Pauli is not a single signed Pauli")
        out.append(int(big[0]))
        sign.append(1 if coeffs[big[0]].real > 0 else -1)
    return CliffordTable(k, tuple(out), tuple(sign))


_builtin_tables: dict[str, CliffordTable] = {}


def clifford_table(name: str) -> CliffordTable:
    table = _builtin_tables.get(name)
    if table is None:
        if name not in CLIFFORD_UNITARIES:
            raise KeyError(f"unknown Clifford gate {name!r}")
        k = int(round(math.log2(CLIFFORD_UNITARIES[name].shape[0])))
        table = _builtin_tables[name] = build_clifford_table(k, name)
    return table


# --------------------------------------------------------------------------
# Gate types


class Gate:
    """Base class.  ``sites`` are 1-indexed and distinct."""

    sites: tuple[int, ...]
    parametrized = False

    @property
    def arity(self) -> int:
        return len(self.sites)

    def local_map(self) -> list[list[tuple[int, float]]]:
        raise NotImplementedError

    def apply(self, w: int, c: float, theta: Optional[float] = None) -> list[tuple[int, float]]:
        sub = get_substring(w, self.sites)
        return [(set_substring(w, self.sites, t), c * f) for t, f in self.local_map()[sub]]

    def matrix_kraus(self, theta: Optional[float] = None) -> list[np.ndarray]:
        """Schrödinger-picture Kraus operators on ``sites`` (used by the dense oracle)."""
        raise NotImplementedError


class CliffordGate(Gate):
    def __init__(self, name: str, sites: Sequence[int], unitary: Optional[np.ndarray] = None):
        self.name = name
        self.sites = _check_sites(sites)
        if unitary is None:
            self.table = clifford_table(name)
            self.unitary = CLIFFORD_UNITARIES[name]
        else:
            self.unitary = np.asarray(unitary, dtype=complex)
            self.table = build_clifford_table(len(self.sites), self.unitary)
        if self.table.arity != len(self.sites):
            raise ValueError(f"{name} acts on {self.table.arity} sites, got {len(self.sites)}")
        self._map = [[(t, float(g))] for t, g in self.table.as_list()]

    def local_map(self):
        return self._map

    def matrix_kraus(self, theta=None):
        return [self.unitary]

    def __repr__(self):
        return f"CliffordGate({self.name!r}, {list(self.sites)})"


class PauliRotation(Gate):
    """``exp(-i theta G / 2)``; acts on observables as ``e^{i theta G/2} P e^{-i theta G/2}``.

    With ``theta=None`` the angle is a free parameter read from the
    parameter vector at propagation time.
    """

    def __init__(self, paulis: Union[str, Sequence], sites: Sequence[int], theta: Optional[float] = None):
        self.sites = _check_sites(sites)
        codes = [SYMBOLS.index(p.upper()) if isinstance(p, str) else int(p) for p in paulis]
        if len(codes) != len(self.sites):
            raise ValueError("one generator Pauli per site is required")
        if not any(codes) or not all(0 <= c <= 3 for c in codes):
            raise ValueError("generator must be non-identity on at least one site")
        self.codes = tuple(codes)
        self.theta = None if theta is None else float(theta)
        self.generator = encode(max(self.sites), zip(self.sites, self.codes))
        self.local_generator = encode(len(self.sites), zip(range(1, len(self.sites) + 1), self.codes))
        # sign of the sine branch per local substring, 0 where the gate commutes
        k = len(self.sites)
        self.branch_sign = tuple(
            0 if commutes(s, self.local_generator) else _sine_sign(self.local_generator, s)
            for s in range(4 ** k)) if k <= 4 else None

    @property
    def parametrized(self) -> bool:
        return self.theta is None

    @property
    def symbol(self) -> str:
        return "".join(SYMBOLS[c] for c in self.codes)

    def apply(self, w, c, theta=None):
        theta = self.theta if theta is None else theta
        if theta is None:
            raise ValueError("rotation angle missing")
        return apply_pauli_rotation(w, c, self.generator, theta)

    def matrix_kraus(self, theta=None):
        theta = self.theta if theta is None else theta
        g = pauli_matrix(self.local_generator, len(self.sites))
        return [math.cos(theta / 2) * np.eye(g.shape[0]) - 1j * math.sin(theta / 2) * g]

    def __repr__(self):
        t = "" if self.theta is None else f", theta={self.theta!r}"
        return f"PauliRotation({self.symbol!r}, {list(self.sites)}{t})"


class TGate(PauliRotation):
    """T gate, i.e. a Z rotation by pi/4 (equal up to global phase)."""

    def __init__(self, site: int):
        super().__init__("Z", [site], theta=math.pi / 4)

    def __repr__(self):
        return f"TGate({self.sites[0]})"


def _sine_sign(g: int, p: int) -> int:
    # branch word is i[G,P]/2 = i G P for anticommuting G, P
    _, k = pauli_product(g, p)
    return -1 if k == 1 else 1


class PauliNoise(Gate):
    """Pauli channel; diagonal in the Pauli basis.

    ``kind`` is ``"depolarizing"`` or ``"dephasing"`` (one or two sites,
    probability ``p``) or ``"pauli"`` (one site, ``p=(px, py, pz)``).
    """

    KINDS = ("depolarizing", "dephasing", "pauli")

    def __init__(self, kind: str, sites: Sequence[int], p):
        if kind not in self.KINDS:
            raise ValueError(f"unknown noise kind {kind!r}")
        self.kind = kind
        self.sites = _check_sites(sites)
        k = len(self.sites)
        if kind == "pauli":
            if k != 1:
                raise ValueError("inhomogeneous Pauli noise acts on one site")
            probs = tuple(float(x) for x in p)
            if len(probs) != 3 or min(probs) < 0 or sum(probs) > 1 + 1e-12:
                raise ValueError("need px, py, pz >= 0 with px + py + pz <= 1")
            self.p = probs
        else:
            if k not in (1, 2):
                raise ValueError(f"{kind} noise acts on one or two sites")
            if not 0 <= float(p) <= 1:
                raise ValueError("probability must lie in [0, 1]")
            self.p = float(p)
        self.factors = tuple(self._factor(s) for s in range(4 ** k))
        self._map = [[(s, f)] if f != 0 else [] for s, f in enumerate(self.factors)]

    def _factor(self, sub: int) -> float:
        k = len(self.sites)
        if sub == 0:
            return 1.0
        if self.kind == "pauli":
            px, py, pz = self.p
            return {1: 1 - 2 * py - 2 * pz, 2: 1 - 2 * px - 2 * pz, 3: 1 - 2 * px - 2 * py}[sub]
        p = self.p
        if self.kind == "depolarizing":
            return 1 - 4 * p / 3 if k == 1 else 1 - 16 * p / 15
        has_xy = any(((sub >> (2 * j)) & 3) in (1, 2) for j in range(k))
        if not has_xy:
            return 1.0
        return 1 - 2 * p if k == 1 else 1 - 4 * p / 3

    def local_map(self):
        return self._map

    def matrix_kraus(self, theta=None):
        k = len(self.sites)
        if self.kind == "pauli":
            px, py, pz = self.p
            probs = {0: 1 - px - py - pz, 1: px, 2: py, 3: pz}
        elif self.kind == "depolarizing":
            others = 4 ** k - 1
            probs = {s: (1 - self.p if s == 0 else self.p / others) for s in range(4 ** k)}
        else:
            zs = [s for s in range(4 ** k)
                  if all(((s >> (2 * j)) & 3) in (0, 3) for j in range(k)) and s]
            probs = {0: 1 - self.p, **{s: self.p / len(zs) for s in zs}}
        return [math.sqrt(q) * pauli_matrix(s, k) for s, q in probs.items() if q > 0]

    def __repr__(self):
        return f"PauliNoise({self.kind!r}, {list(self.sites)}, {self.p!r})"


class AmplitudeDamping(Gate):
    def __init__(self, site: int, gamma: float):
        self.sites = _check_sites([site])
        if not 0 < gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        self.gamma = float(gamma)
        d = math.sqrt(1 - self.gamma)
        self._map = [[(0, 1.0)], [(1, d)], [(2, d)], [(3, 1 - self.gamma), (0, self.gamma)]]

    def local_map(self):
        return self._map

    def matrix_kraus(self, theta=None):
        g = self.gamma
        return [np.array([[1, 0], [0, math.sqrt(1 - g)]], dtype=complex),
                np.array([[0, math.sqrt(g)], [0, 0]], dtype=complex)]

    def __repr__(self):
        return f"AmplitudeDamping({self.sites[0]}, {self.gamma!r})"


class ProjectorZero(Gate):
    """Projector onto ``|0><0|`` of one site (not trace preserving)."""

    _MAP = [[(0, 0.5), (3, 0.5)], [], [], [(0, 0.5), (3, 0.5)]]

    def __init__(self, site: int):
        self.sites = _check_sites([site])

    def local_map(self):
        return self._MAP

    def matrix_kraus(self, theta=None):
        return [np.array([[1, 0], [0, 0]], dtype=complex)]

    def __repr__(self):
        return f"ProjectorZero({self.sites[0]})"


class TransferMapGate(Gate):
    """Generic ``k``-site operation given by its Heisenberg transfer map.

    ``tmap[s]`` lists the ``(output substring, coefficient)`` pairs that
    input substring ``s`` maps to.
    """

    def __init__(self, sites: Sequence[int], tmap: Sequence[Sequence[tuple[int, float]]],
                 kraus: Optional[list[np.ndarray]] = None):
        self.sites = _check_sites(sites)
        k = len(self.sites)
        if len(tmap) != 4 ** k:
            raise ValueError(f"transfer map for {k} sites needs {4 ** k} entries, got {len(tmap)}")
        clean = []
        for entry in tmap:
            row = []
            for t, a in entry:
                t, a = int(t), float(a)
                if not 0 <= t < 4 ** k or not math.isfinite(a):
                    raise ValueError(f"bad transfer map entry {(t, a)}")
                row.append((t, a))
            clean.append(row)
        self._map = clean
        self.kraus = kraus

    @classmethod
    def from_ptm(cls, sites, ptm: np.ndarray, tol: float = PTM_TOL, kraus=None) -> "TransferMapGate":
        """Build from a Schrödinger PTM; the Heisenberg map uses its transpose."""
        ptm = np.asarray(ptm, dtype=float)
        adj = ptm.T
        tmap = [[(i, float(adj[i, j])) for i in range(adj.shape[0]) if abs(adj[i, j]) >= tol]
                for j in range(adj.shape[1])]
        return cls(sites, tmap, kraus=kraus)

    @classmethod
    def from_kraus(cls, sites, kraus: Sequence[np.ndarray], tol: float = PTM_TOL) -> "TransferMapGate":
        ptm = ptm_from_channel(len(tuple(sites)), kraus)
        return cls.from_ptm(sites, ptm, tol=tol, kraus=[np.asarray(k, dtype=complex) for k in kraus])

    def local_map(self):
        return self._map

    def matrix_kraus(self, theta=None):
        if self.kraus is not None:
            return self.kraus
        raise NotImplementedError("dense simulation of a transfer map needs its Kraus operators")

    def to_dict(self) -> dict:
        k = len(self.sites)
        sym = lambda s: "".join(SYMBOLS[(s >> (2 * j)) & 3] for j in range(k))  # noqa: E731
        return {"arity": k,
                "map": {sym(s): [[sym(t), a] for t, a in row] for s, row in enumerate(self._map)}}

    @classmethod
    def from_dict(cls, sites, data: dict) -> "TransferMapGate":
        k = int(data.get("arity", len(tuple(sites))))
        if k != len(tuple(sites)):
            raise ValueError(f"transfer map arity {k} does not match sites {sites}")

        def parse(sym):
            if len(sym) != k:
                raise ValueError(f"substring {sym!r} must have {k} symbols")
            return sum(SYMBOLS.index(ch.upper()) << (2 * j) for j, ch in enumerate(sym))

        tmap = [[] for _ in range(4 ** k)]
        for key, row in data["map"].items():
            tmap[parse(key)] = [(parse(t), float(a)) for t, a in row]
        return cls(sites, tmap)

    @classmethod
    def from_file(cls, sites, path) -> "TransferMapGate":
        with open(path) as fh:
            return cls.from_dict(sites, json.load(fh))

    def __repr__(self):
        return f"TransferMapGate({list(self.sites)})"


# --------------------------------------------------------------------------
# Per-word actions


def apply_clifford(w: int, c: float, g: CliffordGate) -> tuple[int, float]:
    sub = get_substring(w, g.sites)
    return set_substring(w, g.sites, g.table.out[sub]), c * g.table.sign[sub]


def apply_pauli_rotation(w: int, c: float, generator: int, theta: float) -> list[tuple[int, float]]:
    """Heisenberg action of ``exp(-i theta G/2)`` on ``c * P``."""
    if generator == 0:
        raise ValueError("generator must not be the identity")
    if commutes(w, generator):
        return [(w, c)]
    return [(w, c * math.cos(theta)), (w ^ generator, c * math.sin(theta) * _sine_sign(generator, w))]


def apply_t_gate(w: int, c: float, site: int) -> list[tuple[int, float]]:
    return apply_pauli_rotation(w, c, 3 << (2 * (site - 1)), math.pi / 4)


def apply_pauli_noise(w: int, c: float, ch: PauliNoise) -> tuple[int, float]:
    return w, c * ch.factors[get_substring(w, ch.sites)]


def apply_amplitude_damping(w: int, c: float, site: int, gamma: float) -> list[tuple[int, float]]:
    return AmplitudeDamping(site, gamma).apply(w, c)


def apply_projector_zero(w: int, c: float, site: int) -> list[tuple[int, float]]:
    return ProjectorZero(site).apply(w, c)


def apply_transfer_map(w: int, c: float, g: TransferMapGate) -> list[tuple[int, float]]:
    return g.apply(w, c)


def ptm_from_channel(k: int, kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Schrödinger PTM ``[E]_ij = Tr[P_i E(P_j)] / 2**k`` of a Kraus channel."""
    ks = [np.asarray(m, dtype=complex) for m in kraus]
    d = 2 ** k
    if not ks or any(m.shape != (d, d) for m in ks):
        raise ValueError(f"Kraus operators must be {d}x{d}")
    total = sum(m.conj().T @ m for m in ks)
    if np.linalg.eigvalsh(total).max() > 1 + 1e-9:
        raise ValueError("Kraus operators are not trace non-increasing")
    paulis = [pauli_matrix(s, k) for s in range(4 ** k)]
    ptm = np.empty((4 ** k, 4 ** k))
    for j, pj in enumerate(paulis):
        image = sum(m @ pj @ m.conj().T for m in ks)
        for i, pi in enumerate(paulis):
            ptm[i, j] = np.trace(pi @ image).real / d
    return ptm
