"""Expectation values: overlaps of a propagated sum with states and operators.

Coefficients are treated as those of normalized Pauli operators, except in
:func:`overlap_with_pauli_sum`, which restores the ``2**n`` trace factor.
"""

from __future__ import annotations

from typing import Sequence, Union

from .pauli_bits import SYMBOLS, right_mask
from .pauli_sum import PauliSum, coeff_value, scalar_product


class ProductStabilizerState:
    """Tensor product of single-qubit stabilizer states ``(I + s_i sigma_i) / 2``."""

    def __init__(self, axes: Sequence[Union[int, str]], signs: Sequence[int]):
        axes = [SYMBOLS.index(a.upper()) if isinstance(a, str) else int(a) for a in axes]
        signs = [int(s) for s in signs]
        if len(axes) != len(signs) or not axes:
            raise ValueError("need one (axis, sign) pair per qubit")
        if any(a not in (1, 2, 3) for a in axes):
            raise ValueError("axes must be X, Y or Z")
        if any(s not in (1, -1) for s in signs):
            raise ValueError("signs must be +1 or -1")
        self.axes = tuple(axes)
        self.signs = tuple(signs)

    @property
    def nqubits(self) -> int:
        return len(self.axes)

    @classmethod
    def from_string(cls, text: str) -> "ProductStabilizerState":
        """Parse ``"+Z-X+Y"``; a missing sign means ``+``."""
        axes, signs = [], []
        sign = 1
        for ch in text.strip():
            if ch in "+-":
                sign = 1 if ch == "+" else -1
            elif ch.upper() in "XYZ":
                axes.append(ch.upper())
                signs.append(sign)
                sign = 1
            elif not ch.isspace():
                raise ValueError(f"bad stabilizer state character {ch!r}")
        return cls(axes, signs)

    @classmethod
    def zero(cls, n: int) -> "ProductStabilizerState":
        return cls([3] * n, [1] * n)

    def to_string(self) -> str:
        return "".join(("+" if s > 0 else "-") + SYMBOLS[a] for a, s in zip(self.axes, self.signs))

    def __repr__(self) -> str:
        return f"ProductStabilizerState.from_string({self.to_string()!r})"


def as_stabilizer_state(state, n: int) -> ProductStabilizerState:
    """Coerce ``"zero"``, ``"plus"``, a bitstring or a stabilizer product to the latter."""
    if isinstance(state, ProductStabilizerState):
        if state.nqubits != n:
            raise ValueError(f"state has {state.nqubits} qubits, expected {n}")
        return state
    if state == "zero":
        return ProductStabilizerState([3] * n, [1] * n)
    if state == "plus":
        return ProductStabilizerState([1] * n, [1] * n)
    if isinstance(state, str) and state.startswith("stab:"):
        return as_stabilizer_state(ProductStabilizerState.from_string(state[5:]), n)
    bits = _bits(state, n)
    return ProductStabilizerState([3] * n, [1 - 2 * b for b in bits])


def stabilizer_masks(state: ProductStabilizerState) -> tuple[int, int]:
    """``(target word, negative-sign mask)`` used by the bitwise overlap rule."""
    target = sum(a << (2 * i) for i, a in enumerate(state.axes))
    neg = sum(1 << (2 * i) for i, sg in enumerate(state.signs) if sg < 0)
    return target, neg


def stabilizer_sign(w: int, target: int, neg: int, mr: int) -> int:
    """``Tr[P_w rho]`` for a stabilizer product given by its masks: 0 or +-1."""
    supp = (w | (w >> 1)) & mr
    if (w ^ target) & (supp | (supp << 1)):
        return 0
    return -1 if (supp & neg).bit_count() & 1 else 1


def overlap_with_zero(s: PauliSum) -> float:
    mr = right_mask(s.nqubits)
    return sum(coeff_value(c) for w, c in s.terms.items() if not (w ^ (w >> 1)) & mr)


def overlap_with_plus(s: PauliSum) -> float:
    ml = right_mask(s.nqubits) << 1
    return sum(coeff_value(c) for w, c in s.terms.items() if not w & ml)


def _bits(x, n: int) -> list[int]:
    bits = [int(b) for b in x]
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise ValueError(f"expected {n} bits, got {x!r}")
    return bits


def overlap_with_computational(s: PauliSum, x) -> float:
    """Overlap with ``|x><x|``; ``x`` lists bits for sites ``1..n``."""
    n = s.nqubits
    mr = right_mask(n)
    flip = sum(1 << (2 * i) for i, b in enumerate(_bits(x, n)) if b)
    total = 0.0
    for w, c in s.terms.items():
        if not (w ^ (w >> 1)) & mr:
            v = coeff_value(c)
            total += -v if (w & flip).bit_count() & 1 else v
    return total


def overlap_with_product_stabilizer(s: PauliSum, rho: ProductStabilizerState) -> float:
    n = s.nqubits
    if rho.nqubits != n:
        raise ValueError(f"state has {rho.nqubits} qubits, sum has {n}")
    mr = right_mask(n)
    target, neg = stabilizer_masks(rho)
    total = 0.0
    for w, c in s.terms.items():
        supp = (w | (w >> 1)) & mr
        if (w ^ target) & (supp | (supp << 1)):
            continue
        v = coeff_value(c)
        total += -v if (supp & neg).bit_count() & 1 else v
    return total


def overlap_with_pauli_sum(rho: PauliSum, s: PauliSum) -> float:
    """``Tr[rho S]`` for ``rho`` given by its Pauli coefficients."""
    return 2.0 ** s.nqubits * scalar_product(rho, s)


def correlation_lookup(s: PauliSum, q: int) -> float:
    """Coefficient of ``q``, i.e. ``2**-n Tr[q E(q)]`` when ``s = E(q)``."""
    return coeff_value(s.get_coeff(q))


def zero_state_sum(n: int) -> PauliSum:
    """Pauli coefficients of ``|0...0><0...0|``."""
    words = [0]
    for i in range(n):
        words += [w | (3 << (2 * i)) for w in words]
    return PauliSum(n, {w: 2.0 ** -n for w in words})


def overlap(s: PauliSum, state) -> float:
    """Dispatch on the state: ``"zero"``, ``"plus"``, a bitstring, a
    :class:`ProductStabilizerState` or a density operator as a :class:`PauliSum`."""
    if isinstance(state, ProductStabilizerState):
        return overlap_with_product_stabilizer(s, state)
    if isinstance(state, PauliSum):
        return overlap_with_pauli_sum(state, s)
    if state == "zero":
        return overlap_with_zero(s)
    if state == "plus":
        return overlap_with_plus(s)
    if isinstance(state, str) and state.startswith("stab:"):
        return overlap_with_product_stabilizer(s, as_stabilizer_state(state, s.nqubits))
    return overlap_with_computational(s, state)
