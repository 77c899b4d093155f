"""Irreducibility by trial division and absolute-irreducibility certificates.

Reducibility over F_{2^k} is decided by sweeping candidate homogeneous
divisors in the graded-lex term order, pruned by Newton-corner
compatibility (the leading and trailing monomials of a divisor must divide
those of the target).  Multivariate division by a single divisor gives an
exact test: the quotient ring of a principal ideal leaves remainder zero
exactly on multiples.

For mask inputs (coefficients in F_2) the extension sweeps shrink by Galois
descent: if f is irreducible over F_2, the Frobenius permutes the monic
irreducible factors of f over F_{2^s}; an orbit of size 1 would be a proper
F_2 factor, so every factorization consists of s conjugate factors of
degree d/s.  Only monic degree-(d/s) sweeps over F_{2^s} for s dividing k
(s > 1, s | d) are needed, which keeps the degree-6/F_8 case at 8^5
candidates instead of 8^9.

A curve irreducible over the (perfect) field F_{2^k} that has a simple
point over F_{2^k} is absolutely irreducible: the absolutely irreducible
factors are conjugate, so a point of one is a point of all, and a simple
point lies on exactly one factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .count import projective_points
from .gf2m import FieldTable, build_field
from .polyrep import PolyMask, Triple, decode, evaluate, monomials, partials

HomPoly = dict[Triple, int]


@dataclass(frozen=True)
class Factor:
    """A witness divisor over F_{2^k}."""

    k: int
    degree: int
    terms: tuple[tuple[Triple, int], ...]  # (monomial, coefficient encoding)

    def as_dict(self) -> HomPoly:
        return dict(self.terms)

    def __str__(self) -> str:
        parts = []
        for (i, j, kk), c in self.terms:
            mono = "*".join(
                v if e == 1 else f"{v}^{e}"
                for v, e in zip("xyz", (i, j, kk))
                if e
            )
            parts.append(mono if c == 1 else f"[{c}]*{mono}")
        return f"F_{{2^{self.k}}}: " + " + ".join(parts)


@dataclass(frozen=True)
class IrreducibilityStatus:
    over_f2: str  # "irreducible" | "reducible"
    simple_point: tuple[int, tuple[int, int, int]] | None  # (k, point)
    absolute: str  # "yes" | "reducible" | "unknown"
    certificate_field: int | None
    witness: Factor | None

    def to_json(self) -> dict:
        return {
            "absolute": self.absolute,
            "k": self.certificate_field,
            "witness": str(self.witness) if self.witness else None,
        }


def mask_to_dict(f: PolyMask) -> HomPoly:
    return {t: 1 for t in decode(f)}


def _leading(p: HomPoly) -> Triple:
    return max(p)  # tuple comparison is graded-lex within a fixed degree


def _trailing(p: HomPoly) -> Triple:
    return min(p)


def _div_mono(a: Triple, b: Triple) -> bool:
    return a[0] >= b[0] and a[1] >= b[1] and a[2] >= b[2]


def hom_divmod(f: HomPoly, g: HomPoly, field: FieldTable
               ) -> tuple[HomPoly | None, bool]:
    """(quotient, divisible) for homogeneous f, g; quotient None when not."""
    if not g:
        raise ValueError("zero divisor")
    r = dict(f)
    gl = _leading(g)
    glc = g[gl]
    quot: HomPoly = {}
    while r:
        rl = _leading(r)
        if not _div_mono(rl, gl):
            return None, False
        qm = (rl[0] - gl[0], rl[1] - gl[1], rl[2] - gl[2])
        qc = field.div(r[rl], glc)
        quot[qm] = quot.get(qm, 0) ^ qc
        for gm, gc in g.items():
            key = (gm[0] + qm[0], gm[1] + qm[1], gm[2] + qm[2])
            val = r.get(key, 0) ^ field.mul(qc, gc)
            if val:
                r[key] = val
            else:
                r.pop(key, None)
    return quot, True


def divides(g: HomPoly, f: HomPoly, field: FieldTable) -> bool:
    """True iff f = g * h for a homogeneous h over the same field."""
    if not g:
        raise ValueError("zero divisor")
    dg = sum(_leading(g))
    df = sum(_leading(f)) if f else 0
    if not 1 <= dg < df:
        raise ValueError(f"divisor degree {dg} not in 1..{df - 1}")
    return hom_divmod(f, g, field)[1]


def hom_mul(a: HomPoly, b: HomPoly, field: FieldTable) -> HomPoly:
    out: HomPoly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            key = (ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2])
            val = out.get(key, 0) ^ field.mul(ca, cb)
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    return out


def _monic_forms(e: int, field: FieldTable, lead_f: Triple, trail_f: Triple
                 ) -> Iterator[HomPoly]:
    """Monic degree-e candidates whose corners can divide the target's."""
    basis = monomials(e)
    n = len(basis)
    nonzero = [c for c in range(1, field.order)]
    for lead in range(n):
        if not _div_mono(lead_f, basis[lead]):
            continue
        free = n - lead - 1
        # Odometer over coefficient assignments of the positions after lead.
        counters = [0] * free
        while True:
            g = {basis[lead]: 1}
            for pos, c in enumerate(counters):
                if c:
                    g[basis[lead + 1 + pos]] = c
            if _div_mono(trail_f, _trailing(g)):
                yield g
            i = free - 1
            while i >= 0:
                counters[i] += 1
                if counters[i] < field.order:
                    break
                counters[i] = 0
                i -= 1
            if i < 0:
                break


def _sweep(f: HomPoly, degrees: Iterator[int] | list[int], field: FieldTable
           ) -> HomPoly | None:
    lead_f = _leading(f)
    trail_f = _trailing(f)
    for e in degrees:
        for g in _monic_forms(e, field, lead_f, trail_f):
            if hom_divmod(f, g, field)[1]:
                return g
    return None


def _witness(g: HomPoly, k: int) -> Factor:
    terms = tuple(sorted(g.items(), reverse=True))
    return Factor(k=k, degree=sum(_leading(g)), terms=terms)


@lru_cache(maxsize=1 << 16)
def _find_factor_mask(f: PolyMask, k: int) -> Factor | None:
    d = f.degree
    fd = mask_to_dict(f)
    f2 = build_field(1)
    w = _sweep(fd, range(1, d // 2 + 1), f2)
    if w is not None:
        return _witness(w, 1)
    for s in range(2, k + 1):
        if k % s or d % s:
            continue
        field = build_field(s)
        w = _sweep(fd, [d // s], field)
        if w is not None:
            return _witness(w, s)
    return None


def find_factor(f: PolyMask | HomPoly, k: int, field: FieldTable | None = None
                ) -> Factor | None:
    """First divisor of f over F_{2^k} in sweep order, or None.

    Mask inputs take the Galois-descent route; explicit coefficient dicts
    are swept in full over F_{2^k} (feasible for the small degrees this
    package certifies).
    """
    if not 1 <= k <= 3:
        raise ValueError("irreducibility is tested over F_2, F_4, F_8 only")
    if isinstance(f, PolyMask):
        return _find_factor_mask(f, k)
    field = field or build_field(k)
    d = sum(_leading(f))
    w = _sweep(f, range(1, d // 2 + 1), field)
    return _witness(w, k) if w is not None else None


def is_irreducible(f: PolyMask | HomPoly, k: int) -> bool:
    return find_factor(f, k) is None


def find_simple_point(f: PolyMask, max_k: int = 3
                      ) -> tuple[int, tuple[int, int, int]] | None:
    """First curve point with nonzero gradient, scanning F_2, then F_4, F_8."""
    grads = partials(f)
    for k in range(1, max_k + 1):
        field = build_field(k)
        for p in projective_points(field):
            if evaluate(f, p, field) != 0:
                continue
            if any(evaluate(g, p, field) != 0 for g in grads if g.bits):
                return k, p
    return None


def certify_absolute(f: PolyMask) -> IrreducibilityStatus:
    """Theorem-of-the-simple-point certificate, escalating F_2 -> F_4 -> F_8."""
    w2 = _find_factor_mask(f, 1)
    over_f2 = "reducible" if w2 is not None else "irreducible"
    if w2 is not None:
        return IrreducibilityStatus(over_f2, None, "reducible", None, w2)
    sp = find_simple_point(f)
    if sp is None:
        # No usable point; still report a factor over any tested field.
        for k in (2, 3):
            w = _find_factor_mask(f, k)
            if w is not None:
                return IrreducibilityStatus(over_f2, None, "reducible", None, w)
        return IrreducibilityStatus(over_f2, None, "unknown", None, None)
    k = sp[0]
    w = _find_factor_mask(f, k)
    if w is not None:
        return IrreducibilityStatus(over_f2, sp, "reducible", None, w)
    return IrreducibilityStatus(over_f2, sp, "yes", k, None)
