"""Bit-packed Pauli strings.

A Pauli string on ``n`` sites is a non-negative Python ``int`` read as a
base-four numeral: site ``i`` (1-indexed) lives in bits ``2(i-1)`` and
``2(i-1)+1`` with codes ``I=0, X=1, Y=2, Z=3``.  Site 1 is the least
significant digit but is rendered leftmost, so ``ZYX == 27``.

Phases of products are carried as an exponent ``k`` of ``i**k`` (mod 4).
"""

from __future__ import annotations

from typing import Iterable

I, X, Y, Z = 0, 1, 2, 3
SYMBOLS = "IXYZ"
_CODE_OF = {s: c for c, s in enumerate(SYMBOLS)}

# _PHASE[a][b] = k such that sigma_a sigma_b = i**k sigma_(a^b)
_PHASE = (
    (0, 0, 0, 0),
    (0, 0, 1, 3),
    (0, 3, 0, 1),
    (0, 1, 3, 0),
)

_mask_cache: dict[int, int] = {}


def right_mask(nqubits: int) -> int:
    """Alternating mask ``01...0101`` covering ``nqubits`` sites."""
    m = _mask_cache.get(nqubits)
    if m is None:
        m = int("01" * nqubits, 2) if nqubits > 0 else 0
        _mask_cache[nqubits] = m
    return m


def word_bits(nqubits: int) -> int:
    """Smallest of 8/16/32/64/128 bits holding ``nqubits`` sites, else a multiple of 64."""
    need = 2 * nqubits
    for width in (8, 16, 32, 64, 128):
        if need <= width:
            return width
    return 64 * -(-need // 64)


def _check_site(site: int, nqubits: int | None) -> None:
    if site < 1 or (nqubits is not None and site > nqubits):
        raise IndexError(f"site {site} out of range 1..{nqubits}")


def encode(nqubits: int, entries: Iterable[tuple[int, int | str]]) -> int:
    """Build a word from ``(site, code)`` pairs; unspecified sites are identity."""
    w = 0
    seen = set()
    for site, code in entries:
        _check_site(site, nqubits)
        if site in seen:
            raise ValueError(f"duplicate site {site}")
        seen.add(site)
        code = _CODE_OF[code] if isinstance(code, str) else int(code)
        if not 0 <= code <= 3:
            raise ValueError(f"invalid Pauli code {code}")
        w |= code << (2 * (site - 1))
    return w


def get_pauli(w: int, site: int, nqubits: int | None = None) -> int:
    _check_site(site, nqubits)
    return (w >> (2 * (site - 1))) & 3


def set_pauli(w: int, site: int, code: int, nqubits: int | None = None) -> int:
    _check_site(site, nqubits)
    if not 0 <= code <= 3:
        raise ValueError(f"invalid Pauli code {code}")
    shift = 2 * (site - 1)
    return (w & ~(3 << shift)) | (code << shift)


def get_substring(w: int, sites: Iterable[int]) -> int:
    """Pack the Paulis at ``sites`` into a small word, first site lowest."""
    sub = 0
    for j, site in enumerate(sites):
        sub |= ((w >> (2 * (site - 1))) & 3) << (2 * j)
    return sub


def set_substring(w: int, sites: Iterable[int], sub: int) -> int:
    for j, site in enumerate(sites):
        shift = 2 * (site - 1)
        w = (w & ~(3 << shift)) | (((sub >> (2 * j)) & 3) << shift)
    return w


def site_mask(sites: Iterable[int]) -> int:
    """Mask with both bits set at each of ``sites``."""
    m = 0
    for site in sites:
        m |= 3 << (2 * (site - 1))
    return m


def _check_pair(a: int, b: int, nqubits: int | None) -> None:
    if nqubits is not None and max(a, b) >> (2 * nqubits):
        raise ValueError("word exceeds the declared number of qubits")


def anticommuting_sites(a: int, b: int) -> int:
    """Mask with the right bit set at every site where ``a`` and ``b`` anticommute."""
    nq = max(a.bit_length(), b.bit_length()) // 2 + 1
    mr = right_mask(nq)
    ml = mr << 1
    return ((a & mr) & ((b & ml) >> 1)) ^ ((b & mr) & ((a & ml) >> 1))


def commutes(a: int, b: int, nqubits: int | None = None) -> bool:
    _check_pair(a, b, nqubits)
    return not anticommuting_sites(a, b).bit_count() & 1


def pauli_product(a: int, b: int, nqubits: int | None = None) -> tuple[int, int]:
    """Return ``(a ^ b, k)`` with ``a * b = i**k (a ^ b)``.

    The phase is counted bitwise: per site, the cyclic pairs XY, YZ, ZX
    contribute ``+i`` and the anticyclic ones ``-i``.
    """
    _check_pair(a, b, nqubits)
    nq = max(a.bit_length(), b.bit_length()) // 2 + 1
    mr = right_mask(nq)
    ar, al = a & mr, (a >> 1) & mr
    br, bl = b & mr, (b >> 1) & mr
    ax, ay, az = ar & ~al, al & ~ar, ar & al
    bx, by, bz = br & ~bl, bl & ~br, br & bl
    pos = ((ax & by) | (ay & bz) | (az & bx)).bit_count()
    neg = ((ay & bx) | (az & by) | (ax & bz)).bit_count()
    return a ^ b, (pos - neg) & 3


def single_phase(a: int, b: int) -> int:
    """Phase exponent of the single-site product ``sigma_a sigma_b``."""
    return _PHASE[a][b]


def weight(w: int) -> int:
    """Number of non-identity sites."""
    return (right_mask(w.bit_length() // 2 + 1) & (w | (w >> 1))).bit_count()


def xy_weight(w: int) -> int:
    """Number of X or Y sites."""
    return (right_mask(w.bit_length() // 2 + 1) & (w ^ (w >> 1))).bit_count()


def yz_weight(w: int) -> int:
    """Number of Y or Z sites."""
    return (w & (right_mask(w.bit_length() // 2 + 1) << 1)).bit_count()


def to_symbols(w: int, nqubits: int) -> str:
    """Render as ``"ZYX"``-style text, site 1 first."""
    if w >> (2 * nqubits):
        raise ValueError("word exceeds the declared number of qubits")
    return "".join(SYMBOLS[(w >> (2 * i)) & 3] for i in range(nqubits))


def from_symbols(text: str) -> tuple[int, int]:
    """Parse ``"ZYX"``-style text; returns ``(word, nqubits)``."""
    text = text.strip().upper()
    w = 0
    for i, ch in enumerate(text):
        try:
            w |= _CODE_OF[ch] << (2 * i)
        except KeyError:
            raise ValueError(f"invalid Pauli symbol {ch!r} in {text!r}") from None
    return w, len(text)


def decode(w: int, nqubits: int) -> list[tuple[int, int]]:
    """Inverse of :func:`encode`: the non-identity ``(site, code)`` pairs."""
    return [(i + 1, c) for i in range(nqubits) if (c := (w >> (2 * i)) & 3)]
