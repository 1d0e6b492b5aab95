"""Binary sequences and their two file encodings.

``.bits`` files are packed MSB-first: bit k of the sequence is bit ``7 - k % 8``
of byte ``k // 8``; pad bits of the final byte are discarded.  ``.txt`` files
hold ASCII '0'/'1' characters, with whitespace ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from dftt.errors import InputError, InputTooShortError, ParseError

_WHITESPACE = frozenset(" \t\r\n\v\f")


@dataclass(frozen=True, eq=False)
class BitSequence:
    """An immutable sequence of n >= 2 bits stored as a read-only uint8 array."""

    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.bits, dtype=np.uint8, copy=True).ravel()
        if arr.size < 2:
            raise InputError(f"a bit sequence needs at least 2 bits, got {arr.size}")
        if arr.size and arr.max() > 1:
            raise InputError("bits must be 0 or 1")
        arr.flags.writeable = False
        object.__setattr__(self, "bits", arr)

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitSequence):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __repr__(self) -> str:
        text = self.render()
        if len(text) > 40:
            text = text[:37] + "..."
        return f"BitSequence(n={self.n}, bits='{text}')"

    def render(self) -> str:
        """ASCII '0'/'1' form, the inverse of :func:`from_ascii`."""
        return (self.bits + ord("0")).tobytes().decode("ascii")

    def to_bytes(self) -> bytes:
        """Packed MSB-first form; the final byte is zero padded."""
        return np.packbits(self.bits).tobytes()


def from_bytes_msb_first(raw: bytes, n: int) -> BitSequence:
    need = -(-n // 8)
    if n < 0:
        raise InputError(f"bit count must be non-negative, got {n}")
    if len(raw) < need:
        raise InputTooShortError(
            f"{n} bits need {need} bytes, only {len(raw)} available"
        )
    packed = np.frombuffer(bytes(raw[:need]), dtype=np.uint8)
    return BitSequence(np.unpackbits(packed)[:n])


def from_ascii(text: str) -> BitSequence:
    out = []
    for pos, ch in enumerate(text):
        if ch == "0" or ch == "1":
            out.append(ord(ch) - 48)
        elif ch not in _WHITESPACE:
            raise ParseError(f"invalid symbol {ch!r}", pos)
    return BitSequence(np.array(out, dtype=np.uint8))


def signed(seq: BitSequence) -> np.ndarray:
    """Map bit x to 2x - 1, giving a float64 array of +/-1."""
    return seq.bits.astype(np.float64) * 2.0 - 1.0


def read_file(path: str | Path, fmt: str, n: int | None = None) -> BitSequence:
    """Load a sequence; ``fmt`` is ``"ascii"`` or ``"packed"`` (never sniffed).

    Packed input takes its length from ``n``; without it every bit of the
    file is used.
    """
    path = Path(path)
    try:
        if fmt == "ascii":
            return from_ascii(path.read_text(encoding="ascii", errors="replace"))
        if fmt == "packed":
            raw = path.read_bytes()
            return from_bytes_msb_first(raw, 8 * len(raw) if n is None else n)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    raise InputError(f"unknown format {fmt!r}; expected 'ascii' or 'packed'")
