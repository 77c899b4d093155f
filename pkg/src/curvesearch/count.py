"""Point enumeration and smooth/singular point counting over P^2(F_q).

The projective plane is enumerated once per field as normalized
representatives (1, y, z), then (0, 1, z), then (0, 0, 1), and for each
point the values of all basis monomials of a degree are tabulated.  A curve
with w monomials then costs w contiguous-row XOR passes per field, which is
what makes the exhaustive search tractable.  The tables for the largest
field/degree combination run to a few hundred MB; `PointCounter` can be
built with tables disabled (or falls back automatically when allocation
fails), evaluating in fixed-size chunks instead.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .gf2m import FieldTable
from .polyrep import PolyMask, bit_indices, monomials, partials


@dataclass(frozen=True)
class PointCount:
    """Per-field tally for one curve; total = smooth + len(singular_points)."""

    q: int
    total: int
    smooth: int
    singular_points: tuple[tuple[int, int, int], ...]


def projective_points(field: FieldTable) -> Iterator[tuple[int, int, int]]:
    """The q^2 + q + 1 normalized points of P^2(F_q), in the canonical order."""
    q = field.order
    for y in range(q):
        for z in range(q):
            yield (1, y, z)
    for z in range(q):
        yield (0, 1, z)
    yield (0, 0, 1)


class PointCounter:
    """Bulk curve evaluation over one field.

    Monomial tables are stored monomial-major (row t = values of basis
    monomial t at every point) so that accumulating a curve is a sequence of
    contiguous XOR passes.
    """

    def __init__(self, field: FieldTable, *, use_tables: bool = True,
                 chunk: int = 1 << 18):
        self.field = field
        self.q = field.order
        self.n_points = self.q * self.q + self.q + 1
        self.use_tables = use_tables
        self.chunk = chunk
        q = self.q
        coords = np.zeros((3, self.n_points), dtype=np.uint16)
        grid = np.arange(q, dtype=np.uint16)
        coords[0, : q * q] = 1
        coords[1, : q * q] = np.repeat(grid, q)
        coords[2, : q * q] = np.tile(grid, q)
        coords[1, q * q : q * q + q] = 1
        coords[2, q * q : q * q + q] = grid
        coords[2, -1] = 1
        self.coords = coords
        self._tables: dict[int, np.ndarray] = {}

    # -- table construction --------------------------------------------------

    def _power_rows(self, coord: np.ndarray, max_e: int) -> list[np.ndarray]:
        rows = [np.ones_like(coord)]
        for e in range(1, max_e + 1):
            rows.append(self.field.mul_arr(rows[-1], coord))
        return rows

    def _build_table(self, d: int) -> np.ndarray:
        basis = monomials(d)
        out = np.empty((len(basis), self.n_points), dtype=np.uint16)
        px = self._power_rows(self.coords[0], d)
        py = self._power_rows(self.coords[1], d)
        pz = self._power_rows(self.coords[2], d)
        for t, (i, j, k) in enumerate(basis):
            out[t] = self.field.mul_arr(self.field.mul_arr(px[i], py[j]), pz[k])
        return out

    def monomial_table(self, d: int) -> np.ndarray | None:
        if not self.use_tables:
            return None
        if d not in self._tables:
            try:
                self._tables[d] = self._build_table(d)
            except MemoryError:
                warnings.warn(
                    f"monomial table for q={self.q}, d={d} does not fit in "
                    "memory; falling back to the streaming evaluator"
                )
                self.use_tables = False
                self._tables.clear()
                return None
        return self._tables[d]

    # -- evaluation ------------------------------------------------------------

    def _accumulate(self, cols: list[int], d: int, lo: int, hi: int,
                    table: np.ndarray | None) -> np.ndarray:
        if table is not None:
            acc = table[cols[0], lo:hi].copy()
            for c in cols[1:]:
                acc ^= table[c, lo:hi]
            return acc
        basis = monomials(d)
        x, y, z = (self.coords[v, lo:hi] for v in range(3))
        max_e = d
        px = self._power_rows(x, max_e)
        py = self._power_rows(y, max_e)
        pz = self._power_rows(z, max_e)
        acc = np.zeros(hi - lo, dtype=np.uint16)
        for c in cols:
            i, j, k = basis[c]
            acc ^= self.field.mul_arr(self.field.mul_arr(px[i], py[j]), pz[k])
        return acc

    def values_at(self, f: PolyMask, idx: np.ndarray) -> np.ndarray:
        """Curve values at a sparse set of point indices."""
        cols = bit_indices(f.bits)
        if not cols:
            return np.zeros(len(idx), dtype=np.uint16)
        table = self.monomial_table(f.degree)
        if table is not None:
            acc = table[cols[0]][idx].copy()
            for c in cols[1:]:
                acc ^= table[c][idx]
            return acc
        basis = monomials(f.degree)
        x, y, z = (self.coords[v][idx] for v in range(3))
        acc = np.zeros(len(idx), dtype=np.uint16)
        px = self._power_rows(x, f.degree)
        py = self._power_rows(y, f.degree)
        pz = self._power_rows(z, f.degree)
        for c in cols:
            i, j, k = basis[c]
            acc ^= self.field.mul_arr(self.field.mul_arr(px[i], py[j]), pz[k])
        return acc

    def zero_indices(self, f: PolyMask) -> np.ndarray:
        """Indices of points on the curve, in enumeration order."""
        cols = bit_indices(f.bits)
        if not cols:
            raise ValueError("zero polynomial")
        table = self.monomial_table(f.degree)
        if table is not None:
            acc = self._accumulate(cols, f.degree, 0, self.n_points, table)
            return np.flatnonzero(acc == 0)
        parts = []
        for lo in range(0, self.n_points, self.chunk):
            hi = min(lo + self.chunk, self.n_points)
            acc = self._accumulate(cols, f.degree, lo, hi, None)
            parts.append(np.flatnonzero(acc == 0) + lo)
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def count(self, f: PolyMask) -> PointCount:
        """Totals plus the singular points (all partials vanishing)."""
        zeros = self.zero_indices(f)
        total = int(len(zeros))
        if total == 0:
            return PointCount(self.q, 0, 0, ())
        if f.degree == 1:
            # The gradient of a nonzero linear form is a nonzero constant.
            return PointCount(self.q, total, total, ())
        sing_sel = np.ones(total, dtype=bool)
        for pmask in partials(f):
            if pmask.bits == 0:
                continue
            vals = self.values_at(pmask, zeros)
            sing_sel &= vals == 0
        sing_idx = zeros[sing_sel]
        singular = tuple(
            (int(self.coords[0, i]), int(self.coords[1, i]), int(self.coords[2, i]))
            for i in sing_idx
        )
        return PointCount(self.q, total, total - len(singular), singular)


def count_points(f: PolyMask, field: FieldTable, *, use_tables: bool = True
                 ) -> PointCount:
    """One-shot count for a single curve (tables are only worth it in bulk)."""
    if f.bits == 0:
        raise ValueError("zero polynomial")
    return PointCounter(field, use_tables=use_tables).count(f)


def naive_count(f: PolyMask, field: FieldTable) -> PointCount:
    """Oracle: double loop over points, monomials by repeated multiplication."""
    from .polyrep import decode

    monos = decode(f)
    pmonos = [decode(p) if p.bits else [] for p in partials(f)]

    def ev(monolist, p):
        acc = 0
        for i, j, k in monolist:
            term = 1
            for base, e in zip(p, (i, j, k)):
                for _ in range(e):
                    term = field.mul(term, base)
            acc ^= term
        return acc

    total = 0
    singular = []
    for p in projective_points(field):
        if ev(monos, p) != 0:
            continue
        total += 1
        if f.degree == 1:
            continue
        if all(ev(pm, p) == 0 for pm in pmonos):
            singular.append(p)
    return PointCount(field.order, total, total - len(singular), tuple(singular))
