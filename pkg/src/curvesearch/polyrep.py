"""Bit-exact masks for homogeneous polynomials over F_2 in x, y, z.

A degree-d polynomial is a presence bitmask over the fixed monomial basis:
the exponent triples (i, j, k) with i + j + k = d, ordered graded-lex
descending in i, then in j, so index 0 is always x^d and the last index is
z^d.  Degree 6 has binomial(8, 2) = 28 monomials, hence 28-bit masks.

Linear substitution uses the row-vector convention: substitute(f, M) is
f((x, y, z) M), which makes substitute(substitute(f, A), B) equal to
substitute(f, B A).  Matrices are triples of 3-bit row ints (bit j of
row r is the entry M[r][j]).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, NamedTuple

from .gf2m import FieldTable

MAX_DEGREE = 6

Triple = tuple[int, int, int]
Mat3 = tuple[int, int, int]  # three 3-bit rows over F_2

IDENTITY: Mat3 = (0b001, 0b010, 0b100)


class PolyMask(NamedTuple):
    degree: int
    bits: int

    def __str__(self) -> str:
        return format_poly(self)

    @property
    def mask_id(self) -> str:
        return f"d{self.degree}:0x{self.bits:08x}"


def basis_size(d: int) -> int:
    return (d + 1) * (d + 2) // 2


@lru_cache(maxsize=None)
def monomials(d: int) -> tuple[Triple, ...]:
    """The degree-d exponent triples in the fixed basis order (degree 0 allowed
    so that partial derivatives of linear forms stay representable)."""
    if not 0 <= d <= MAX_DEGREE:
        raise ValueError(f"degree must be in 0..{MAX_DEGREE}, got {d}")
    out = [(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]
    assert len(out) == basis_size(d)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(d: int) -> dict[Triple, int]:
    return {t: n for n, t in enumerate(monomials(d))}


def encode(triples: Iterable[Triple]) -> PolyMask:
    """Bitmask of a monomial list; rejects mixed degrees and duplicates."""
    triples = list(triples)
    if not triples:
        raise ValueError("empty monomial list")
    d = sum(triples[0])
    if any(min(t) < 0 for t in triples):
        raise ValueError("negative exponent")
    if any(sum(t) != d for t in triples):
        raise ValueError("mixed degrees in monomial list")
    idx = monomial_index(d)
    bits = 0
    for t in triples:
        b = 1 << idx[t]
        if bits & b:
            raise ValueError(f"duplicate monomial {t}")
        bits |= b
    return PolyMask(d, bits)


def decode(f: PolyMask) -> list[Triple]:
    basis = monomials(f.degree)
    return [basis[n] for n in bit_indices(f.bits)]


def bit_indices(bits: int) -> list[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


def full_mask(d: int) -> int:
    return (1 << basis_size(d)) - 1


# -- evaluation -------------------------------------------------------------


def evaluate(f: PolyMask, point: tuple[int, int, int], field: FieldTable) -> int:
    """f(x, y, z) in the given field; bulk paths live in the count module."""
    x, y, z = point
    if x == y == z == 0:
        raise ValueError("(0, 0, 0) is not a projective point")
    acc = 0
    for i, j, k in decode(f):
        acc ^= field.mul(field.mul(field.pow(x, i), field.pow(y, j)), field.pow(z, k))
    return acc


# -- formal partial derivatives ----------------------------------------------


@lru_cache(maxsize=None)
def _partial_maps(d: int) -> tuple[tuple[int, ...], ...]:
    # For each variable v, entry t is the degree-(d-1) image mask of basis
    # monomial t (0 when the exponent is even and the term vanishes mod 2).
    lower = monomial_index(d - 1)
    maps = []
    for var in range(3):
        images = []
        for mono in monomials(d):
            e = list(mono)
            if e[var] % 2 == 0:
                images.append(0)
                continue
            e[var] -= 1
            images.append(1 << lower[tuple(e)])
        maps.append(tuple(images))
    return tuple(maps)


def partials(f: PolyMask) -> tuple[PolyMask, PolyMask, PolyMask]:
    """Formal characteristic-2 partials (f_x, f_y, f_z), each of degree d-1."""
    out = []
    for var in range(3):
        m = _partial_maps(f.degree)[var]
        bits = 0
        for t in bit_indices(f.bits):
            bits ^= m[t]
        out.append(PolyMask(f.degree - 1, bits))
    return tuple(out)  # type: ignore[return-value]


# -- polynomial product (shared symbolic helper) ------------------------------


def mul_masks(a: PolyMask, b: PolyMask) -> PolyMask:
    """Product over F_2; degrees add, coefficients cancel mod 2."""
    idx = monomial_index(a.degree + b.degree)
    am = decode(a)
    bm = decode(b)
    bits = 0
    for ia, ja, ka in am:
        for ib, jb, kb in bm:
            bits ^= 1 << idx[(ia + ib, ja + jb, ka + kb)]
    return PolyMask(a.degree + b.degree, bits)


# -- linear substitution ------------------------------------------------------


def mat_det(m: Mat3) -> int:
    r0, r1, r2 = m
    # Expansion over F_2: parity of the permanent equals the determinant.
    det = 0
    for c0 in range(3):
        for c1 in range(3):
            if c1 == c0:
                continue
            c2 = 3 - c0 - c1
            det ^= (r0 >> c0) & (r1 >> c1) & (r2 >> c2) & 1
    return det


def mat_mul(a: Mat3, b: Mat3) -> Mat3:
    rows = []
    for r in range(3):
        row = 0
        for c in range(3):
            bit = 0
            for t in range(3):
                bit ^= ((a[r] >> t) & 1) & ((b[t] >> c) & 1)
            row |= bit << c
        rows.append(row)
    return tuple(rows)  # type: ignore[return-value]


@lru_cache(maxsize=None)
def _column_images(d: int, m: Mat3) -> tuple[int, ...]:
    """Image mask of each degree-d basis monomial under v -> v M."""
    # Variable c is replaced by the linear form with coefficient M[r][c] on
    # variable r, i.e. column c of M.
    lin = []
    for c in range(3):
        bits = 0
        for r in range(3):
            if (m[r] >> c) & 1:
                bits |= 1 << r  # degree-1 basis order is exactly x, y, z
        lin.append(PolyMask(1, bits))
    images = []
    for i, j, k in monomials(d):
        acc = None
        for form, e in ((lin[0], i), (lin[1], j), (lin[2], k)):
            for _ in range(e):
                acc = form if acc is None else mul_masks(acc, form)
        images.append(acc.bits)
    return tuple(images)


def substitute(f: PolyMask, m: Mat3) -> PolyMask:
    """f((x, y, z) M) reduced over F_2; M must be invertible."""
    if mat_det(m) != 1:
        raise ValueError(f"singular matrix {m}")
    images = _column_images(f.degree, m)
    bits = 0
    for t in bit_indices(f.bits):
        bits ^= images[t]
    return PolyMask(f.degree, bits)


def column_image_table(d: int, m: Mat3) -> tuple[int, ...]:
    """Public accessor for the per-monomial substitution images (sieve kernel)."""
    return _column_images(d, m)


# -- cheap reducibility filters ----------------------------------------------


@lru_cache(maxsize=None)
def _filter_masks(d: int) -> tuple[int, int, int, int]:
    all_even = 0
    div = [0, 0, 0]
    for t, mono in enumerate(monomials(d)):
        if all(e % 2 == 0 for e in mono):
            all_even |= 1 << t
        for var in range(3):
            if mono[var] >= 1:
                div[var] |= 1 << t
    return (all_even, *div)


def is_trivially_reducible(f: PolyMask) -> bool:
    """All exponents even (a perfect square mod 2) or divisible by a variable.

    Degree-1 forms never fire: dividing out the variable leaves a unit, so a
    linear form is irreducible and the filter exists only to drop reducibles.
    """
    if f.degree < 2:
        return False
    masks = _filter_masks(f.degree)
    return any(f.bits & ~m == 0 for m in masks)


# -- text and id forms ---------------------------------------------------------

_VARS = ("x", "y", "z")


def format_poly(f: PolyMask) -> str:
    """Canonical catalog form, monomials in basis order joined by " + "."""
    if f.bits == 0:
        return "0"
    parts = []
    for i, j, k in decode(f):
        factors = []
        for var, e in zip(_VARS, (i, j, k)):
            if e == 1:
                factors.append(var)
            elif e > 1:
                factors.append(f"{var}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def parse_poly(text: str) -> PolyMask:
    """Parse the canonical textual form (also accepts extra whitespace)."""
    triples = []
    for term in text.replace("-", "+").split("+"):
        term = term.strip()
        if not term:
            raise ValueError(f"empty term in polynomial text: {text!r}")
        exps = {"x": 0, "y": 0, "z": 0}
        for factor in term.split("*"):
            factor = factor.strip()
            if "^" in factor:
                var, _, e = factor.partition("^")
                var = var.strip()
                exp = int(e)
            else:
                var, exp = factor, 1
            if var not in exps:
                raise ValueError(f"unknown variable {var!r} in {term!r}")
            exps[var] += exp
        triples.append((exps["x"], exps["y"], exps["z"]))
    return encode(triples)


def format_mask_id(f: PolyMask) -> str:
    return f.mask_id


def parse_mask_id(text: str) -> PolyMask:
    """Parse the "d6:0x0f00a031" serialization."""
    head, _, hexpart = text.partition(":")
    if not head.startswith("d") or not hexpart.startswith("0x"):
        raise ValueError(f"bad mask id {text!r}")
    d = int(head[1:])
    bits = int(hexpart, 16)
    if not 1 <= d <= MAX_DEGREE:
        raise ValueError(f"bad degree in mask id {text!r}")
    if not 1 <= bits <= full_mask(d):
        raise ValueError(f"mask bits out of range in {text!r}")
    return PolyMask(d, bits)
