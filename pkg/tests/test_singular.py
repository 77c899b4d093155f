"""Singularity classification: multiplicity, cones, factorization, blowups."""

import random

import pytest

from curvesearch.count import PointCounter
from curvesearch.gf2m import build_field
from curvesearch.orbit import enumerate_gl3
from curvesearch.polyrep import PolyMask, full_mask, parse_poly, substitute
from curvesearch.singular import (
    SingularPoint,
    analyze_singular_point,
    blowup_points_estimate,
    check_theorem1,
    cone_type,
    factor_binary_form,
    form_is_squarefree,
    multiplicity_at,
    tangent_cone_at,
)

F2 = build_field(1)
F4 = build_field(2)
F8 = build_field(3)
F16 = build_field(4)


def test_multiplicity_reference_cases():
    f1024 = build_field(10)
    g5 = parse_poly("x^3*y^2 + y^5 + x^3*y*z + y^3*z^2 + z^5")
    assert multiplicity_at(g5, (1, 0, 0), f1024) == 2

    f128 = build_field(7)
    g3 = parse_poly(
        "x^6 + x^5*y + x^4*y^2 + x^3*y^3 + x^2*y^4 + x^5*z + x^4*y*z"
        " + y^4*z^2 + x^3*z^3 + y^3*z^3"
    )
    assert multiplicity_at(g3, (0, 0, 1), f128) == 3

    h = parse_poly("x^5 + y^5 + z^5")
    assert multiplicity_at(h, (0, 1, 1), F16) == 1  # smooth point
    with pytest.raises(ValueError):
        multiplicity_at(h, (1, 0, 0), F16)  # not on the curve
    with pytest.raises(ValueError):
        tangent_cone_at(h, (0, 1, 1), F16)  # smooth point has no cone


def test_cone_types_reference_cases():
    cases = [
        ("x^3*y^2 + y^5 + x^3*y*z + y^3*z^2 + z^5", 10, (1, 0, 0), "u v", True, (2, True)),
        (
            "x^5*y + x^3*y^3 + x*y^5 + x^5*z + y^5*z + x^2*y^2*z^2 + x^3*z^3"
            " + y^3*z^3 + x*z^5 + y*z^5",
            4, (1, 1, 1), "u^2+u v+v^2", True, (2, True),
        ),
        (
            "x^3*y^3 + x^2*y^4 + y^5*z + x^3*y*z^2 + x*y^2*z^3 + y^3*z^3"
            " + y^2*z^4 + z^6",
            8, (1, 0, 0), "u v^2", False, (2, False),
        ),
        (
            "x^3*y^3 + y^6 + x*y^4*z + y^5*z + x^2*y^2*z^2 + y^4*z^2 + x^3*z^3"
            " + x*y*z^4 + x*z^5 + y*z^5",
            9, (1, 0, 0), "(u+v)(u^2+u v+v^2)", True, (1, True),
        ),
        (
            "x^4*y^2 + x^5*z + x^4*y*z + x^2*y^3*z + x^2*y^2*z^2 + x*y^3*z^2"
            " + x^2*z^4 + x*y*z^4 + y^2*z^4",
            7, (0, 1, 0), "u v(u+v)", True, (3, True),
        ),
    ]
    for text, m, point, want_type, want_ordinary, want_blowup in cases:
        field = build_field(m)
        s = analyze_singular_point(parse_poly(text), point, field)
        assert s.cone_type == want_type, (text, s.cone_type)
        assert s.ordinary == want_ordinary
        assert blowup_points_estimate(s, field) == want_blowup


def test_quadratic_cone_rational_directions_depend_on_field_parity():
    # u^2 + u v + v^2 splits over F_4, so over F_{2^m} it has 2 rational
    # directions iff m is even.
    form = (1, 1, 1)
    assert factor_binary_form(form, F2) == []
    assert len(factor_binary_form(form, F4)) == 2
    assert factor_binary_form(form, F8) == []
    assert len(factor_binary_form(form, F16)) == 2


def test_factor_binary_form_examples():
    uv = (0, 1, 0)
    roots = dict(factor_binary_form(uv, F8))
    assert roots == {(1, 0): 1, (0, 1): 1}

    uv2 = (0, 0, 1, 0)  # u v^2: the direction (1:0) is the double root
    roots = dict(factor_binary_form(uv2, F8))
    assert roots == {(1, 0): 2, (0, 1): 1}
    assert not form_is_squarefree(uv2, F8)

    with pytest.raises(ValueError):
        factor_binary_form((0, 0, 0), F8)


def test_factor_binary_form_against_product_oracle():
    # Build forms as explicit products of linear factors over F_8 and compare
    # the recovered roots/multiplicities with the construction.
    directions = [(1, 0)] + [(t, 1) for t in range(8)]

    def normalize(u, v):
        if u != 0:
            return (1, F8.div(v, u))
        return (0, 1)

    rng = random.Random(3)
    for _ in range(300):
        deg = rng.randint(2, 4)
        chosen = [directions[rng.randrange(len(directions))] for _ in range(deg)]
        # expand product of (v0 u + u0 v) for each direction (u0: v0)
        form = [1]
        for (u0, v0) in chosen:
            # multiply by (v0 * u + u0 * v): coefficients indexed by v-power
            new = [0] * (len(form) + 1)
            for i, c in enumerate(form):
                new[i] ^= F8.mul(c, v0)
                new[i + 1] ^= F8.mul(c, u0)
            form = new
        want: dict = {}
        for (u0, v0) in chosen:
            key = normalize(u0, v0)
            want[key] = want.get(key, 0) + 1
        got = dict(factor_binary_form(tuple(form), F8))
        assert got == want, (chosen, form)
        assert form_is_squarefree(tuple(form), F8) == all(
            m == 1 for m in want.values()
        )


def test_factor_multiplicity_sum_bounded_by_degree():
    rng = random.Random(4)
    for _ in range(200):
        deg = rng.randint(1, 5)
        form = tuple(rng.randrange(64) for _ in range(deg + 1))
        if not any(form):
            continue
        roots = factor_binary_form(form, build_field(6))
        total = sum(m for _, m in roots)
        assert total <= deg


def test_cone_type_fallbacks():
    # Square of a linear form: outside the catalog alphabet.
    assert cone_type((1, 0, 0), F2, 1) == "deg=2 squarefree=false"
    # Irreducible cubic over F_2 (no rational roots): generic fallback.
    assert cone_type((1, 0, 1, 1), F2, 1) == "deg=3 squarefree=true"


def test_multiplicity_invariant_under_coordinate_change():
    mats = enumerate_gl3()
    f128 = build_field(7)
    counter = PointCounter(f128)
    g3 = parse_poly(
        "x^6 + x^5*y + x^4*y^2 + x^3*y^3 + x^2*y^4 + x^5*z + x^4*y*z"
        " + y^4*z^2 + x^3*z^3 + y^3*z^3"
    )
    base = sorted(
        multiplicity_at(g3, p, f128)
        for p in counter.count(g3).singular_points
    )
    rng = random.Random(5)
    for _ in range(10):
        m = mats[rng.randrange(168)]
        g = substitute(g3, m)
        moved = sorted(
            multiplicity_at(g, p, f128)
            for p in counter.count(g).singular_points
        )
        assert moved == base, m


def test_singular_iff_multiplicity_at_least_two():
    counter = PointCounter(F8)
    rng = random.Random(6)
    checked = 0
    for _ in range(300):
        d = rng.randint(2, 6)
        f = PolyMask(d, rng.randint(1, full_mask(d)))
        pc = counter.count(f)
        for p in pc.singular_points[:3]:
            assert multiplicity_at(f, p, F8) >= 2
            checked += 1
    assert checked > 50


def test_check_theorem1():
    assert check_theorem1([2, 2], 6) is True
    assert check_theorem1([3, 3], 5) is False
    assert check_theorem1([4, 3], 6) is False
    with pytest.raises(ValueError):
        check_theorem1([2], 6)
    with pytest.raises(ValueError):
        check_theorem1([1, 2], 6)


def test_blowup_estimate_requires_matching_field():
    s = SingularPoint(
        point=(1, 0, 0), q=8, k=1, multiplicity=2, cone=(0, 1, 0),
        cone_type="u v", ordinary=True,
    )
    with pytest.raises(ValueError):
        blowup_points_estimate(s, F16)
