"""GL_3(F_2) enumeration and orbit sieving of the degree-d mask space.

The sieve scans masks in ascending order over a live bit table (one bit per
mask, 2^28 bits = 32 MiB packed for degree 6).  A mask whose bit is still
set when the scan reaches it is the minimum of its orbit and is emitted as
the orbit representative; all 168 images are then cleared.  Emission is an
intrinsic property of the mask (being its orbit's minimum), so the result
is independent of scan interleaving and of how ranges are batched.

The kernel applies all 168 substitutions to blocks of candidate masks via
per-matrix byte lookup tables: a degree-d substitution is F_2-linear on
masks, so the image of a mask is the XOR of per-byte precomputed images.

Checkpoint byte order: the packed table uses numpy packbits with
bitorder="little", i.e. byte i, bit j (LSB first) corresponds to mask
8 * i + j.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .polyrep import (
    Mat3,
    PolyMask,
    basis_size,
    column_image_table,
    full_mask,
    mat_det,
    substitute,
    _filter_masks,
)

GL3_ORDER = 168  # (2^3 - 1)(2^3 - 2)(2^3 - 4)


@lru_cache(maxsize=1)
def enumerate_gl3() -> tuple[Mat3, ...]:
    """All 168 invertible 3x3 matrices over F_2, in ascending row order."""
    out = []
    for r0 in range(1, 8):
        for r1 in range(1, 8):
            for r2 in range(1, 8):
                m = (r0, r1, r2)
                if mat_det(m) == 1:
                    out.append(m)
    assert len(out) == GL3_ORDER
    return tuple(out)


def orbit_of(f: PolyMask) -> set[PolyMask]:
    """{ f((x,y,z) M) : M in GL_3(F_2) }; size divides 168."""
    return {substitute(f, m) for m in enumerate_gl3()}


def select_representative(orbit: set[PolyMask]) -> PolyMask:
    """Cheapest-to-evaluate member: fewest monomials, ties by smallest mask."""
    if not orbit:
        raise ValueError("empty orbit")
    return min(orbit, key=lambda p: (bin(p.bits).count("1"), p.bits))


@dataclass(frozen=True)
class OrbitInfo:
    """One orbit as emitted by the sieve."""

    degree: int
    rep_bits: int  # orbit minimum (the scan representative)
    eval_bits: int  # fewest-monomials member, ties by smallest mask
    orbit_size: int
    trivially_reducible: bool  # some member fires the cheap reducibility filter

    @property
    def rep(self) -> PolyMask:
        return PolyMask(self.degree, self.rep_bits)

    @property
    def eval_rep(self) -> PolyMask:
        return PolyMask(self.degree, self.eval_bits)


@dataclass
class SieveStats:
    orbits_total: int = 0
    orbits_trivial: int = 0
    size_sum: int = 0

    @property
    def orbits_emitted(self) -> int:
        return self.orbits_total - self.orbits_trivial


@lru_cache(maxsize=4)
def _byte_luts(d: int) -> np.ndarray:
    """Per-matrix, per-byte-position image tables, shape (168, nbytes, 256)."""
    n = basis_size(d)
    nbytes = (n + 7) // 8
    luts = np.zeros((GL3_ORDER, nbytes, 256), dtype=np.uint32)
    for mi, mat in enumerate(enumerate_gl3()):
        cols = column_image_table(d, mat)
        for bp in range(nbytes):
            lut = luts[mi, bp]
            for b in range(1, 256):
                low = b & -b
                t = 8 * bp + low.bit_length() - 1
                img = cols[t] if t < n else 0
                lut[b] = lut[b & (b - 1)] ^ img
    return luts


class SieveEngine:
    """Range-driven orbit sieve over the full degree-d mask space.

    Owns the live bit table; `run_range` processes one span of the scan and
    returns the orbits whose minimum lies inside it.  `position` only
    advances when a range completes, which is the checkpoint granularity.
    """

    def __init__(self, degree: int, *, block: int = 1 << 16):
        if not 1 <= degree <= 6:
            raise ValueError(f"sieve degree must be 1..6, got {degree}")
        self.degree = degree
        self.space = full_mask(degree)  # masks 1 .. space inclusive
        self.block = block
        self.table = np.ones(self.space + 1, dtype=bool)
        self.table[0] = False
        self.position = 1
        self.stats = SieveStats()

    @property
    def done(self) -> bool:
        return self.position > self.space

    def run_range(self, span: int) -> list[OrbitInfo]:
        """Process masks [position, position + span) and advance position."""
        lo = self.position
        hi = min(lo + span, self.space + 1)
        out: list[OrbitInfo] = []
        luts = _byte_luts(self.degree)
        nbytes = luts.shape[1]
        ev_mask, dx, dy, dz = _filter_masks(self.degree)
        inv_filters = [
            np.uint32(~m & 0xFFFFFFFF) for m in (ev_mask, dx, dy, dz)
        ]

        cand_all = np.flatnonzero(self.table[lo:hi]).astype(np.int64) + lo
        for start in range(0, len(cand_all), self.block):
            cand = cand_all[start : start + self.block]
            cand = cand[self.table[cand]]  # drop masks claimed by earlier blocks
            if len(cand) == 0:
                continue
            cand32 = cand.astype(np.uint32)

            imgs = np.zeros((GL3_ORDER, len(cand)), dtype=np.uint32)
            for bp in range(nbytes):
                byte = ((cand32 >> np.uint32(8 * bp)) & np.uint32(0xFF)).astype(np.intp)
                imgs ^= luts[:, bp, :][:, byte]

            orbit_min = imgs.min(axis=0)
            rep_sel = orbit_min == cand32
            reps = cand32[rep_sel]
            if len(reps):
                rimgs = np.ascontiguousarray(imgs[:, rep_sel])

                srt = np.sort(rimgs, axis=0)
                sizes = 1 + np.count_nonzero(np.diff(srt, axis=0), axis=0)

                pc = np.bitwise_count(rimgs).astype(np.uint64)
                key = (pc << np.uint64(32)) | rimgs.astype(np.uint64)
                best = key.min(axis=0)
                eval_bits = (best & np.uint64(0xFFFFFFFF)).astype(np.uint32)

                triv = np.zeros(len(reps), dtype=bool)
                if self.degree >= 2:
                    for inv in inv_filters:
                        triv |= ((rimgs & inv) == 0).any(axis=0)

                for rb, eb, sz, tv in zip(
                    reps.tolist(), eval_bits.tolist(), sizes.tolist(), triv.tolist()
                ):
                    out.append(OrbitInfo(self.degree, rb, eb, int(sz), bool(tv)))
                self.stats.orbits_total += len(reps)
                self.stats.orbits_trivial += int(triv.sum())
                self.stats.size_sum += int(sizes.sum())

            self.table[imgs.reshape(-1)] = False

        self.position = hi
        return out

    # -- checkpoint serialization ------------------------------------------

    def pack_state(self) -> tuple[int, bytes]:
        packed = np.packbits(self.table, bitorder="little")
        return self.position, packed.tobytes()

    def restore_state(self, position: int, table_bytes: bytes) -> None:
        packed = np.frombuffer(table_bytes, dtype=np.uint8)
        expect = (self.space + 1 + 7) // 8
        if len(packed) != expect:
            raise ValueError(
                f"bit table length {len(packed)} does not match degree {self.degree}"
            )
        table = np.unpackbits(packed, bitorder="little")[: self.space + 1]
        self.table = table.astype(bool)
        self.position = position
        # Tallies restart from the resume point; totals are recomputed by the
        # caller from the merged catalog, not from engine stats.
        self.stats = SieveStats()


def sieve(degree: int, *, include_trivial: bool = False, span: int = 1 << 20
          ) -> Iterator[tuple[PolyMask, int]]:
    """Stream (representative, orbit size) for every orbit of nonzero masks.

    Orbits in which some member fires the cheap reducibility filter are
    cleared but not emitted unless include_trivial is set.
    """
    eng = SieveEngine(degree)
    while not eng.done:
        for info in eng.run_range(span):
            if info.trivially_reducible and not include_trivial:
                continue
            yield info.rep, info.orbit_size


def sieve_all(degree: int, *, span: int = 1 << 20) -> tuple[list[OrbitInfo], SieveStats]:
    """Run the whole sieve, returning every orbit (trivial ones included)."""
    eng = SieveEngine(degree)
    out: list[OrbitInfo] = []
    while not eng.done:
        out.extend(eng.run_range(span))
    return out, eng.stats
