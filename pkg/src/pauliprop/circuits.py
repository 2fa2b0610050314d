"""Topologies and Trotterized Ising circuit builders."""

from __future__ import annotations

from typing import Optional, Sequence

from .gates import (AmplitudeDamping, CliffordGate, PauliNoise, PauliRotation, ProjectorZero, TGate,
                    TransferMapGate)
from .propagation import Circuit

Topology = list[tuple[int, int]]


def bricklayer_topology(n: int, periodic: bool = False) -> Topology:
    """Odd bonds ``(1,2),(3,4),...`` then even bonds ``(2,3),(4,5),...``.

    With ``periodic`` and even ``n > 2`` the wrap bond ``(n, 1)`` closes the
    even sublayer.
    """
    if n < 2:
        raise ValueError("bricklayer topology needs n >= 2")
    odd = [(i, i + 1) for i in range(1, n, 2)]
    even = [(i, i + 1) for i in range(2, n, 2)]
    if periodic and n > 2 and n % 2 == 0:
        even.append((n, 1))
    return odd + even


def rectangle_topology(rows: int, cols: int, periodic: bool = False) -> Topology:
    """Nearest-neighbour bonds on a grid with row-major site numbering."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError("grid needs at least two sites")
    site = lambda r, c: r * cols + c + 1  # noqa: E731
    edges = set()
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.add((site(r, c), site(r, c + 1)))
            elif periodic and cols > 2:
                edges.add((site(r, c), site(r, 0)))
            if r + 1 < rows:
                edges.add((site(r, c), site(r + 1, c)))
            elif periodic and rows > 2:
                edges.add((site(r, c), site(0, c)))
    return sorted(edges)


def _check_topology(topology: Topology, n: int) -> None:
    for i, j in topology:
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise ValueError(f"bad bond {(i, j)} for {n} sites")


def tfi_layer(topology: Topology, n: int, tilted: bool = False) -> list[PauliRotation]:
    """One Trotter step: RX on every site, RZ if ``tilted``, then RZZ per bond."""
    _check_topology(topology, n)
    gates = [PauliRotation("X", [i]) for i in range(1, n + 1)]
    if tilted:
        gates += [PauliRotation("Z", [i]) for i in range(1, n + 1)]
    gates += [PauliRotation("ZZ", [i, j]) for i, j in topology]
    return gates


def tfi_trotter_circuit(topology: Topology, n: int, layers: int, tilted: bool = False) -> Circuit:
    """Transverse-field (optionally tilted) Ising Trotter circuit with one slot per rotation."""
    if layers < 0:
        raise ValueError("layers must be non-negative")
    circ = Circuit(n)
    for _ in range(layers):
        circ.extend(tfi_layer(topology, n, tilted))
    return circ


def ising_angles(circ: Circuit, dt: float, J: float = 1.0, hx: float = 1.0, hz: float = 0.0) -> list[float]:
    """Slot angles for ``H = J sum ZZ + hx sum X + hz sum Z`` with step ``dt``.

    A term ``a P`` contributes ``exp(-i a dt P)``, i.e. rotation angle ``2 a dt``.
    """
    coef = {"X": hx, "Z": hz, "ZZ": J}
    return [2 * coef[g.symbol] * dt for g in circ.gates if g.parametrized]


def bind_shared(circ: Circuit, shared: dict[str, float] | Sequence[dict[str, float]],
                layer_size: Optional[int] = None) -> list[float]:
    """Expand shared angles keyed by generator symbol onto every slot.

    ``shared`` is one ``{"X": a, "Z": b, "ZZ": c}`` mapping for all layers,
    or one mapping per layer when ``layer_size`` (gates per layer) is given.
    """
    if isinstance(shared, dict):
        return [float(shared[g.symbol]) for g in circ.gates if g.parametrized]
    if layer_size is None:
        raise ValueError("per-layer binding needs layer_size")
    out = []
    for i, g in enumerate(circ.gates):
        if g.parametrized:
            out.append(float(shared[i // layer_size][g.symbol]))
    return out


def emit_circuit(circ: Circuit, thetas: Optional[Sequence[float]] = None) -> str:
    """Render in the line-oriented circuit file format.

    Free rotations stay unbound unless ``thetas`` is given.  Transfer maps
    cannot be emitted because they reference external files.
    """
    angles = circ.angles(thetas) if thetas is not None else [None] * len(circ.gates)
    lines = [f"NQ {circ.nqubits}"]
    for g, th in zip(circ.gates, angles):
        sites = " ".join(str(s) for s in g.sites)
        if isinstance(g, TGate):
            lines.append(f"T {sites}")
        elif isinstance(g, PauliRotation):
            th = g.theta if th is None else th
            tail = "" if th is None else f" theta={th!r}"
            if g.symbol in ("X", "Y", "Z", "XX", "YY", "ZZ"):
                lines.append(f"R{g.symbol} {sites}{tail}")
            else:
                lines.append(f"R {g.symbol} {sites}{tail}")
        elif isinstance(g, CliffordGate):
            lines.append(f"{g.name} {sites}")
        elif isinstance(g, PauliNoise):
            if g.kind == "pauli":
                px, py, pz = g.p
                lines.append(f"PAULI {sites} px={px!r} py={py!r} pz={pz!r}")
            else:
                mn = "DEPOL" if g.kind == "depolarizing" else "DEPH"
                lines.append(f"{mn} {sites} p={g.p!r}")
        elif isinstance(g, AmplitudeDamping):
            lines.append(f"AMPDAMP {sites} gamma={g.gamma!r}")
        elif isinstance(g, ProjectorZero):
            lines.append(f"PROJ0 {sites}")
        elif isinstance(g, TransferMapGate):
            raise ValueError("transfer maps cannot be emitted inline")
        else:
            raise ValueError(f"cannot emit {g!r}")
    return "\n".join(lines) + "\n"
