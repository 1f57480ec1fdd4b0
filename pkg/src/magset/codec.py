"""Single asymmetric limited-magnitude error-correcting codes.

A valid set B = {b_0 < ... < b_(m-1)} of residues mod q (see
:mod:`magset.verifier`) acts as the parity row of a length-m code over
Z_q: codewords are the words x with sum(x_i * b_i) = 0 (mod q).  If a
channel can only add a positive error of magnitude at most ``lam`` to at
most one coordinate, the received word's syndrome sum(y_i * b_i) mod q
is either 0 (no error) or e * b_j for exactly one pair (e, j) -- that
is precisely the defining property of a valid set -- so a syndrome table
lookup corrects the error.

The parity row is kept in ascending element order; word positions refer
to that order.  Encoding is systematic through a pivot coordinate: the
first element of B (scanning ascending) that is a unit mod q; the
message fills the remaining m-1 positions in order and the pivot is
solved to cancel the parity sum.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .verifier import SyndromeTable, build_syndrome_table

__all__ = [
    "LinearCode",
    "ChannelStats",
    "NoUnitPivotError",
    "UnknownSyndromeError",
    "make_code",
    "is_codeword",
    "encode",
    "decode",
    "simulate_channel",
]


class NoUnitPivotError(ValueError):
    """Every parity-row element shares a factor with q: cannot encode."""


class UnknownSyndromeError(ValueError):
    """Received syndrome matches no single error of magnitude <= lam.

    This is a detection event: the word suffered more than one error or
    a magnitude beyond the code's bound.
    """

    def __init__(self, syndrome: int, q: int) -> None:
        super().__init__(
            f"syndrome {syndrome} (mod {q}) matches no correctable error")
        self.syndrome = syndrome


@dataclass(frozen=True)
class LinearCode:
    """A length-m parity-check code over Z_q built from a valid set."""

    q: int
    lam: int
    elements: tuple[int, ...]  # parity row, ascending
    table: SyndromeTable

    @property
    def length(self) -> int:
        return len(self.elements)


def make_code(elements: Iterable[int], q: int, lam: int = 4) -> LinearCode:
    """Build the code for a valid set (raises ValueError if not valid)."""
    row = tuple(sorted(elements))
    table = build_syndrome_table(row, q, lam)  # validates the set
    return LinearCode(q=q, lam=lam, elements=row, table=table)


def _check_word(code: LinearCode, word: Sequence[int], name: str) -> list[int]:
    if len(word) != code.length:
        raise ValueError(
            f"{name} must have length {code.length}, got {len(word)}")
    return [int(v) % code.q for v in word]


def _parity(code: LinearCode, word: Sequence[int]) -> int:
    return sum(v * b for v, b in zip(word, code.elements)) % code.q


def is_codeword(code: LinearCode, word: Sequence[int]) -> bool:
    """Whether sum(word[i] * b_i) = 0 (mod q)."""
    return _parity(code, _check_word(code, word, "word")) == 0


def pivot_index(code: LinearCode) -> int:
    """Index of the first parity-row element that is a unit mod q."""
    for i, b in enumerate(code.elements):
        if math.gcd(b, code.q) == 1:
            return i
    raise NoUnitPivotError(
        f"no element of {code.elements} is a unit mod {code.q}")


def encode(code: LinearCode, message: Sequence[int]) -> tuple[int, ...]:
    """Systematic encode: message fills the non-pivot positions in order.

    The pivot coordinate is set to -(sum of the other terms) / b_pivot
    mod q, making the result a codeword.
    """
    p = pivot_index(code)
    if len(message) != code.length - 1:
        raise ValueError(
            f"message must have length {code.length - 1}, got {len(message)}")
    msg = [int(v) % code.q for v in message]
    word = msg[:p] + [0] + msg[p:]
    partial = _parity(code, word)
    inv = pow(code.elements[p], -1, code.q)
    word[p] = -partial * inv % code.q
    return tuple(word)


def decode(code: LinearCode,
           received: Sequence[int]) -> tuple[tuple[int, ...],
                                             Optional[tuple[int, int]]]:
    """Correct at most one positive error of magnitude <= lam.

    Returns (codeword, None) when the received word is already a
    codeword, else (codeword, (position, magnitude)) after subtracting
    the unique matching error.  Raises UnknownSyndromeError when the
    syndrome matches no single in-range error (detected, not corrected).
    """
    y = _check_word(code, received, "received word")
    syndrome = _parity(code, y)
    if syndrome == 0:
        return tuple(y), None
    hit = code.table.lookup(syndrome)
    if hit is None:
        raise UnknownSyndromeError(syndrome, code.q)
    magnitude, element = hit
    position = code.elements.index(element)
    y[position] = (y[position] - magnitude) % code.q
    return tuple(y), (position, magnitude)


@dataclass(frozen=True)
class ChannelStats:
    """Outcome counts of a channel simulation (corrected + detected +
    miscorrected = trials)."""

    trials: int
    corrected: int
    detected: int
    miscorrected: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "corrected": self.corrected,
            "detected": self.detected,
            "miscorrected": self.miscorrected,
            "seed": self.seed,
        }


def simulate_channel(code: LinearCode, trials: int, error_rate: float = 1.0,
                     seed: int = 0) -> ChannelStats:
    """Monte-Carlo check of the decoder over the asymmetric channel.

    Each trial draws a uniform random message, encodes it, then with
    probability ``error_rate`` adds a magnitude uniform in [1, lam] at a
    uniform position (mod q), and decodes.  A trial counts as corrected
    when the decoder returns the transmitted codeword (with at most one
    in-range error that is guaranteed), detected when it raises
    UnknownSyndromeError, miscorrected otherwise.

    Deterministic: trial i uses its own generator seeded with
    "{seed}:{i}", so results are reproducible and order-independent.
    """
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    if not 0.0 <= error_rate <= 1.0:
        raise ValueError(f"error_rate must be in [0, 1], got {error_rate}")
    corrected = detected = miscorrected = 0
    m = code.length
    for i in range(trials):
        rng = random.Random(f"{seed}:{i}")
        message = [rng.randrange(code.q) for _ in range(m - 1)]
        sent = encode(code, message)
        word = list(sent)
        if rng.random() < error_rate:
            position = rng.randrange(m)
            magnitude = rng.randint(1, code.lam)
            word[position] = (word[position] + magnitude) % code.q
        try:
            decoded, _ = decode(code, word)
        except UnknownSyndromeError:
            detected += 1
            continue
        if decoded == sent:
            corrected += 1
        else:
            miscorrected += 1
    return ChannelStats(trials=trials, corrected=corrected,
                        detected=detected, miscorrected=miscorrected,
                        seed=seed)
