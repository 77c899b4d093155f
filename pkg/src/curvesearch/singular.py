"""Singular point classification: multiplicity, tangent cone, blowup credit.

A singular point is moved to the origin of the affine chart of its first
nonzero coordinate; the curve equation is expanded in the two local
coordinates (u, v) and the lowest-degree homogeneous part is the tangent
cone, a binary form whose roots in P^1 are the tangent directions.
Expansion uses Lucas' theorem: over F_2 the binomial C(n, s) is odd exactly
when s is a bit-submask of n.

Binary forms of degree m are stored as coefficient tuples c, with c[j] the
coefficient of u^(m-j) v^j.

The cone type string normalizes the factorization shape over the point's
field of definition (the multiset of irreducible factor degrees with
multiplicities), found by deflating rational roots and classifying the
rootless remainder.  Shapes outside the catalog alphabet fall back to the
generic "deg=m squarefree=b" form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf2m import FieldTable
from .polyrep import PolyMask, decode

PointT = tuple[int, int, int]
FormT = tuple[int, ...]

# Catalog alphabet, keyed by sorted (factor degree, multiplicity) multisets.
_SHAPE_NAMES = {
    ((1, 1), (1, 1)): "u v",
    ((2, 1),): "u^2+u v+v^2",
    ((1, 1), (1, 2)): "u v^2",
    ((1, 1), (2, 1)): "(u+v)(u^2+u v+v^2)",
    ((1, 1), (1, 1), (1, 1)): "u v(u+v)",
}


@dataclass(frozen=True)
class SingularPoint:
    """One singular point of a curve, as seen over the field it was found in."""

    point: PointT  # normalized coordinates, encoded in the scan field
    q: int  # order of the scan field
    k: int  # exponent of the smallest field of definition of the point
    multiplicity: int
    cone: FormT  # tangent cone coefficients, encoded in the scan field
    cone_type: str
    ordinary: bool  # tangent cone squarefree (all directions distinct)


# -- local expansion -----------------------------------------------------------


def local_expansion(f: PolyMask, point: PointT, field: FieldTable
                    ) -> dict[tuple[int, int], int]:
    """Coefficients of f at `point` in local coordinates of its chart.

    Returns {(s, t): coeff} for the expansion sum coeff * u^s v^t, where the
    chart variable is the first nonzero coordinate (normalized to 1) and
    (u, v) offset the remaining two coordinates in x, y, z order.
    """
    if all(c == 0 for c in point):
        raise ValueError("(0, 0, 0) is not a projective point")
    chart = next(v for v in range(3) if point[v] != 0)
    scale = field.inv(point[chart])
    pn = tuple(field.mul(scale, c) for c in point)
    oa, ob = (v for v in range(3) if v != chart)
    b, c = pn[oa], pn[ob]
    acc: dict[tuple[int, int], int] = {}
    for mono in decode(f):
        ea, eb = mono[oa], mono[ob]
        for s in range(ea + 1):
            if s & ~ea:
                continue  # even binomial coefficient
            cb = field.pow(b, ea - s)
            if cb == 0 and s != ea:
                continue
            for t in range(eb + 1):
                if t & ~eb:
                    continue
                cc = field.pow(c, eb - t)
                if cc == 0 and t != eb:
                    continue
                term = field.mul(cb, cc)
                if term:
                    key = (s, t)
                    prev = acc.get(key, 0) ^ term
                    if prev:
                        acc[key] = prev
                    else:
                        acc.pop(key, None)
    return acc


def multiplicity_at(f: PolyMask, point: PointT, field: FieldTable) -> int:
    """Least degree of a nonvanishing local part; 1 at smooth points."""
    exp = local_expansion(f, point, field)
    if (0, 0) in exp:
        raise ValueError(f"point {point} is not on the curve")
    if not exp:
        raise ValueError("zero polynomial")
    return min(s + t for s, t in exp)


def tangent_cone_at(f: PolyMask, point: PointT, field: FieldTable) -> FormT:
    """Lowest local homogeneous part as a binary form; requires a singular point."""
    exp = local_expansion(f, point, field)
    if (0, 0) in exp:
        raise ValueError(f"point {point} is not on the curve")
    m = min(s + t for s, t in exp)
    if m < 2:
        raise ValueError(f"point {point} is smooth (multiplicity 1)")
    return tuple(exp.get((m - j, j), 0) for j in range(m + 1))


# -- univariate helpers over a field table --------------------------------------


def _ptrim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _peval(p: list[int], t0: int, field: FieldTable) -> int:
    acc = 0
    for c in reversed(p):
        acc = field.mul(acc, t0) ^ c
    return acc


def _pderiv(p: list[int]) -> list[int]:
    # Formal derivative in characteristic 2: odd-degree terms survive.
    return _ptrim([p[i] if i % 2 == 1 else 0 for i in range(1, len(p))])


def _pdivmod(a: list[int], b: list[int], field: FieldTable
             ) -> tuple[list[int], list[int]]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [0] * max(len(a) - len(b) + 1, 0)
    inv_lead = field.inv(b[-1])
    while len(a) >= len(b):
        shift = len(a) - len(b)
        coef = field.mul(a[-1], inv_lead)
        q[shift] = coef
        for i, bc in enumerate(b):
            a[shift + i] ^= field.mul(coef, bc)
        _ptrim(a)
    return _ptrim(q), a


def _pgcd(a: list[int], b: list[int], field: FieldTable) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pdivmod(a, b, field)[1]
    return a


def _deflate_root(p: list[int], t0: int, field: FieldTable) -> list[int]:
    # Synthetic division by (t + t0); caller guarantees p(t0) = 0.
    out = [0] * (len(p) - 1)
    carry = 0
    for i in range(len(p) - 1, 0, -1):
        carry = p[i] ^ field.mul(carry, t0)
        out[i - 1] = carry
    return out


# -- binary form factorization ---------------------------------------------------


def form_is_squarefree(form: FormT, field: FieldTable) -> bool:
    """No repeated root over the algebraic closure (gcd with the derivative)."""
    m = len(form) - 1
    p = _ptrim([form[m - i] for i in range(m + 1)])
    if m - (len(p) - 1) >= 2:
        return False  # (1:0) is a repeated root
    if len(p) - 1 <= 0:
        return m <= 1
    dp = _pderiv(p)
    if not dp:
        return False  # only even exponents: a perfect square
    return len(_pgcd(p, dp, field)) == 1


def factor_binary_form(form: FormT, field: FieldTable,
                       elements: list[int] | None = None
                       ) -> list[tuple[tuple[int, int], int]]:
    """All projective roots of the form over the field, with multiplicities.

    Roots are normalized directions (1, w) or (0, 1); found by evaluating at
    all q + 1 directions, multiplicities by repeated deflation.  Restricting
    `elements` to a subfield finds the subfield-rational roots only.
    """
    if all(c == 0 for c in form):
        raise ValueError("zero form")
    m = len(form) - 1
    p = _ptrim([form[m - i] for i in range(m + 1)])
    roots: list[tuple[tuple[int, int], int]] = []
    inf_mult = m - (len(p) - 1)
    if inf_mult > 0:
        roots.append(((1, 0), inf_mult))
    if elements is None:
        elements = list(field.elements())
    for t0 in elements:
        mult = 0
        while len(p) > 1 and _peval(p, t0, field) == 0:
            p = _deflate_root(p, t0, field)
            mult += 1
        if mult:
            direction = (0, 1) if t0 == 0 else (1, field.inv(t0))
            roots.append((direction, mult))
    return roots


def _remainder_after_roots(form: FormT, field: FieldTable,
                           elements: list[int]) -> tuple[list[tuple[int, int]], int]:
    """(root multiplicity shape, degree of the rootless remainder)."""
    m = len(form) - 1
    p = _ptrim([form[m - i] for i in range(m + 1)])
    shape = []
    inf_mult = m - (len(p) - 1)
    if inf_mult > 0:
        shape.append((1, inf_mult))
    for t0 in elements:
        mult = 0
        while len(p) > 1 and _peval(p, t0, field) == 0:
            p = _deflate_root(p, t0, field)
            mult += 1
        if mult:
            shape.append((1, mult))
    return shape, len(p) - 1


def cone_type(form: FormT, field: FieldTable, k: int) -> str:
    """Canonical factorization-shape string over the field of definition F_{2^k}."""
    squarefree = form_is_squarefree(form, field)
    m = len(form) - 1
    fallback = f"deg={m} squarefree={'true' if squarefree else 'false'}"
    if field.m % k:
        return fallback
    elements = field.subfield_elements(k)
    shape, rem_deg = _remainder_after_roots(form, field, elements)
    if rem_deg in (2, 3):
        # No rational root over the definition field, so the remainder is an
        # irreducible quadratic or cubic over it.
        shape.append((rem_deg, 1))
    elif rem_deg != 0:
        return fallback
    key = tuple(sorted(shape))
    return _SHAPE_NAMES.get(key, fallback)


# -- assembly and estimates -------------------------------------------------------


def field_of_definition(point: PointT, field: FieldTable) -> int:
    """Smallest k with all coordinates in F_{2^k} (k divides the field degree)."""
    for k in range(1, field.m + 1):
        if field.m % k:
            continue
        if all(field.in_subfield(c, k) for c in point):
            return k
    return field.m


def analyze_singular_point(f: PolyMask, point: PointT, field: FieldTable
                           ) -> SingularPoint:
    """Full classification of one singular point found over `field`."""
    cone = tangent_cone_at(f, point, field)
    k = field_of_definition(point, field)
    return SingularPoint(
        point=point,
        q=field.order,
        k=k,
        multiplicity=len(cone) - 1,
        cone=cone,
        cone_type=cone_type(cone, field, k),
        ordinary=form_is_squarefree(cone, field),
    )


def blowup_points_estimate(s: SingularPoint, field: FieldTable
                           ) -> tuple[int, bool]:
    """(distinct rational tangent directions, exact_known).

    An ordinary singularity resolves in one blowup with one smooth-model
    point per rational tangent direction, so the count is exact.  Otherwise
    the count is reported with exact_known False and must not be credited
    without review: repeated directions can carry anywhere from zero to
    several rational branches.
    """
    if field.order != s.q:
        raise ValueError("estimate must use the field the point was found over")
    roots = factor_binary_form(s.cone, field)
    return len(roots), s.ordinary


def check_theorem1(multiplicities: list[int], d: int) -> bool:
    """Multiplicity-sum bound for r >= 2 singular points on a degree-d curve.

    By Bezout a line through two singular points forces m_i + m_j <= d, so at
    most one multiplicity can exceed d/2; the sum is bounded by
    floor(d/2) * r + 1 for odd d and floor(d/2) * r for even d.  Every
    absolutely irreducible curve must satisfy this; a violation flags a
    reducible curve or a pipeline bug.
    """
    r = len(multiplicities)
    if r < 2:
        raise ValueError("the bound applies to r >= 2 singular points")
    if any(m < 2 for m in multiplicities):
        raise ValueError("multiplicities of singular points are >= 2")
    cap = (d // 2) * r + (1 if d % 2 else 0)
    return sum(multiplicities) <= cap
