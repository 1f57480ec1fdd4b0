"""Ground truth for the whole package: decide whether a set of residues
has all products e*b mod q (1 <= e <= lam) pairwise distinct and nonzero,
and build the syndrome lookup table that property guarantees.

Two independent implementations are provided; `is_b1_set` (bitset sweep)
is the default and `is_b1_set_reference` (hash map) exists so tests can
cross-check them against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Union

__all__ = [
    "Verdict",
    "SyndromeTable",
    "is_b1_set",
    "is_b1_set_reference",
    "build_syndrome_table",
    "format_witness",
]

# Witness of invalidity: (e, b) when e*b == 0 (mod q); (e1, b1, e2, b2)
# when e1*b1 == e2*b2 (mod q) for distinct pairs.
Witness = Union[tuple[int, int], tuple[int, int, int, int]]


class Verdict(NamedTuple):
    valid: bool
    witness: Optional[Witness]

    def __bool__(self) -> bool:  # allow `if is_b1_set(...):`
        return self.valid


def _checked(elements: Iterable[int], q: int, lam: int) -> list[int]:
    if q < 1 or lam < 1:
        raise ValueError(f"need q >= 1 and lam >= 1, got q={q}, lam={lam}")
    elems = sorted(elements)
    for b in elems:
        if not 1 <= b <= q - 1:
            raise ValueError(f"element {b} outside [1, {q - 1}]")
    if any(a == b for a, b in zip(elems, elems[1:])):
        raise ValueError("elements must be distinct")
    return elems


def is_b1_set(elements: Iterable[int], q: int, lam: int = 4) -> Verdict:
    """Bitset sweep: mark each product e*b mod q; any repeat or zero fails."""
    elems = _checked(elements, q, lam)
    seen = 0
    for b in elems:
        for e in range(1, lam + 1):
            s = e * b % q
            if s == 0 or (seen >> s) & 1:
                return Verdict(False, _witness(elems, q, lam, b, e))
            seen |= 1 << s
    return Verdict(True, None)


def _witness(elems: list[int], q: int, lam: int, b_bad: int, e_bad: int) -> Witness:
    s_bad = e_bad * b_bad % q
    if s_bad == 0:
        return (e_bad, b_bad)
    for b in elems:
        for e in range(1, lam + 1):
            if (e, b) == (e_bad, b_bad):
                continue
            if e * b % q == s_bad:
                return (e, b, e_bad, b_bad)
    raise AssertionError("collision vanished on rewalk")  # pragma: no cover


def is_b1_set_reference(elements: Iterable[int], q: int, lam: int = 4) -> Verdict:
    """Independent hash-map implementation used for cross-checking."""
    elems = _checked(elements, q, lam)
    seen: dict[int, tuple[int, int]] = {}
    for b in elems:
        for e in range(1, lam + 1):
            s = e * b % q
            if s == 0:
                return Verdict(False, (e, b))
            if s in seen:
                return Verdict(False, (*seen[s], e, b))
            seen[s] = (e, b)
    return Verdict(True, None)


@dataclass(frozen=True)
class SyndromeTable:
    """Injective map syndrome -> (magnitude e, element b), size lam * |B|."""

    q: int
    lam: int
    entries: dict[int, tuple[int, int]]

    def lookup(self, syndrome: int) -> Optional[tuple[int, int]]:
        return self.entries.get(syndrome % self.q)


def build_syndrome_table(elements: Iterable[int], q: int, lam: int = 4) -> SyndromeTable:
    """Build the syndrome table; rejects sets that fail `is_b1_set`."""
    elems = _checked(elements, q, lam)
    verdict = is_b1_set(elems, q, lam)
    if not verdict.valid:
        raise ValueError(f"not a valid set: {format_witness(verdict.witness, q)}")
    entries = {e * b % q: (e, b) for b in elems for e in range(1, lam + 1)}
    return SyndromeTable(q, lam, entries)


def format_witness(witness: Optional[Witness], q: int) -> str:
    """Human-readable collision, e.g. '2*1 == 1*2 (mod 9)'."""
    if witness is None:
        return "no collision"
    if len(witness) == 2:
        e, b = witness
        return f"{e}*{b} == 0 (mod {q})"
    e1, b1, e2, b2 = witness
    return f"{e1}*{b1} == {e2}*{b2} (mod {q})"
