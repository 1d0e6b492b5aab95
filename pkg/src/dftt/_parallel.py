"""Fixed-size chunking of task ranges, optionally fanned out to worker processes.

Chunk boundaries depend only on the problem size, never on the worker count,
so concatenated results are bit-identical for any ``workers``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def chunk_ranges(total: int, chunk: int, bounds: Sequence[int] | None = None) -> list[tuple[int, int]]:
    """(start, count) pieces of [0, total) no longer than ``chunk``.

    ``bounds`` are extra cut points (e.g. batch edges) that no piece may straddle.
    """
    cuts = sorted({0, total, *(b for b in (bounds or ()) if 0 < b < total)})
    out = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        for start in range(lo, hi, chunk):
            out.append((start, min(chunk, hi - start)))
    return out


def run_chunks(fn: Callable, pieces: list[tuple[int, int]], args: tuple, workers: int = 1) -> list:
    """Evaluate ``fn(start, count, *args)`` for every piece, preserving order."""
    if workers <= 1 or len(pieces) <= 1:
        return [fn(start, count, *args) for start, count in pieces]
    starts = [p[0] for p in pieces]
    counts = [p[1] for p in pieces]
    extra = [[a] * len(pieces) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, starts, counts, *extra))
