"""The branched cover w^(k+1) = z(z^2-1)^k: fibers, analytic continuation,
reflection symmetries, and deck-transformation words."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxface import cover as cov
from maxface.errors import ValidationError

# ---------------------------------------------------------------------------
# fibers
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_fiber_roots_satisfy_curve(k):
    spec = cov.CoverSpec(k)
    z = 1.7 + 0.6j
    roots = spec.fiber(z)
    assert len(roots) == k + 1
    for w in roots:
        assert abs(w ** (k + 1) - spec.rhs(z)) < 1e-9 * (1 + abs(w)) ** (k + 1)
    # all distinct
    diffs = [abs(a - b) for i, a in enumerate(roots)
             for b in roots[i + 1:]]
    assert min(diffs) > 1e-6


@given(st.floats(min_value=-4, max_value=4), st.floats(min_value=-4, max_value=4),
       st.integers(min_value=1, max_value=4))
@settings(max_examples=60, deadline=None)
def test_solve_fiber_residual(re, im, k):
    z = complex(re, im)
    spec = cov.CoverSpec(k)
    if min(abs(z - b) for b in spec.finite_branch_points) < 1e-3:
        return
    p = cov.solve_fiber(spec, z)
    assert cov.fiber_residual(spec, p) < 1e-8 * (1 + abs(p.w)) ** (k + 1)
    assert cov.on_cover(spec, p)


def test_solve_fiber_near_selection():
    spec = cov.CoverSpec(2)
    roots = spec.fiber(2.0 + 0j)
    for w in roots:
        p = cov.solve_fiber(spec, 2.0, near=w * (1 + 1e-3))
        assert abs(p.w - w) < 1e-8


def test_base_point_is_on_curve():
    for k in (1, 2, 3):
        spec = cov.CoverSpec(k)
        o = cov.base_point(spec)
        assert o.z == 2.0
        assert cov.on_cover(spec, o)
        assert o.w.real > 0 and abs(o.w.imag) < 1e-12  # positive real branch


# ---------------------------------------------------------------------------
# analytic continuation
# ---------------------------------------------------------------------------

def test_continuation_round_trip_trivial_loop():
    spec = cov.CoverSpec(2)
    p0 = cov.solve_fiber(spec, 2.3 + 0j)
    # a small loop encircling no branch point must come back on-sheet
    loop = [2.0 + 0.3 * cmath.exp(2j * math.pi * i / 24) for i in range(25)]
    path = cov.SurfacePath(tuple(loop), p0.w)
    end = cov.continue_path(spec, path)
    assert end.close_to(p0, 1e-9)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_branch_loop_permutes_then_returns(k):
    """A loop around z=1 permutes the fiber; k+1 circuits restore it."""
    spec = cov.CoverSpec(k)
    o = cov.base_point(spec)

    def circle(n_turns):
        # radius-0.4 circle about z=1 (clear of the other branch points),
        # reached from the base by a straight spoke
        pts = [o.z, 1.4 + 0j]
        n = 32 * n_turns
        for i in range(1, n + 1):
            ang = 2 * math.pi * n_turns * i / n
            pts.append(1.0 + 0.4 * cmath.exp(1j * ang))
        pts.append(o.z)
        return cov.SurfacePath(tuple(pts), o.w)

    once = cov.continue_path(spec, circle(1))
    assert abs(once.z - o.z) < 1e-12
    assert abs(once.w - o.w) > 1e-3  # nontrivial permutation
    full = cov.continue_path(spec, circle(k + 1))
    assert full.close_to(o, 1e-8)


def test_sanitize_path_inserts_branch_detour():
    """A segment grazing a branch point gets a clearance detour arc."""
    spec = cov.CoverSpec(1)
    clr = cov.clearance(spec)
    raw = (2.0 + 0.01j, -2.0 + 0.01j)  # passes within 0.01 of z = +-1
    clean = cov.sanitize_path(spec, raw)
    assert len(clean) > 2
    for a, b in zip(clean[:-1], clean[1:]):
        for bp in spec.finite_branch_points:
            assert cov._seg_point_dist(a, b, bp) > 0.5 * clr
    # the detour respects homotopy: continuation along it is well-defined
    p0 = cov.solve_fiber(spec, clean[0])
    end = cov.continue_path(spec, cov.SurfacePath(clean, p0.w))
    assert cov.on_cover(spec, end, 1e-8)


def test_winding_number_oracle():
    square = (1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j, 1 + 1j)
    assert cov.winding_number(square, 0j) == pytest.approx(1.0, abs=1e-9)
    assert cov.winding_number(square, 3.0) == pytest.approx(0.0, abs=1e-9)


# ---------------------------------------------------------------------------
# reflections
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("j", [1, 2, 3])
def test_reflection_is_involution(k, j):
    spec = cov.CoverSpec(k)
    p = cov.solve_fiber(spec, 1.4 + 0.8j)
    q = cov.reflection_apply(spec, j, cov.reflection_apply(spec, j, p))
    assert q.close_to(p, 1e-10)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_reflections_preserve_curve(k):
    spec = cov.CoverSpec(k)
    p = cov.solve_fiber(spec, 0.6 + 0.45j)
    for j in (1, 2, 3):
        q = cov.reflection_apply(spec, j, p)
        assert cov.on_cover(spec, q, 1e-8)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_mu2_mu1_has_order_k_plus_1(k):
    """mu2 mu1 fixes z and rotates w by a primitive (k+1)-th phase."""
    spec = cov.CoverSpec(k)
    p = cov.solve_fiber(spec, 1.9 - 0.3j)
    one = cov.reflection_apply(spec, 2, cov.reflection_apply(spec, 1, p))
    assert abs(one.z - p.z) < 1e-12
    assert one.w / p.w == pytest.approx(cmath.exp(2j * spec.k * spec.lam),
                                        abs=1e-12)
    q = p
    for _ in range(k + 1):
        q = cov.reflection_apply(spec, 2, cov.reflection_apply(spec, 1, q))
    assert q.close_to(p, 1e-9)
    # ... and no earlier power is the identity
    q = p
    for _ in range(k):
        q = cov.reflection_apply(spec, 2, cov.reflection_apply(spec, 1, q))
    if k >= 1:
        assert abs(q.w - p.w) > 1e-3


def test_kappa1_matches_word():
    """kappa1 = z -> e^(2 i lam) z rotation composed from mu2 mu1."""
    spec = cov.CoverSpec(2)
    p = cov.solve_fiber(spec, 1.3 + 0.7j)
    via_word = cov.reflection_apply(spec, 2, cov.reflection_apply(spec, 1, p))
    direct = cov.kappa1_apply(spec, p)
    # kappa1 is one of the two composition orders
    alt = cov.reflection_apply(spec, 1, cov.reflection_apply(spec, 2, p))
    assert direct.close_to(via_word, 1e-9) or direct.close_to(alt, 1e-9)


# ---------------------------------------------------------------------------
# deck words and canonical loops
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2, 3])
def test_end_words_are_identity_loops(k):
    spec = cov.CoverSpec(k)
    for word in (cov.word_end_zero(k), cov.word_end_infinity(k),
                 cov.word_base_loop()):
        path = cov.deck_word_path(spec, word)
        assert cov.loop_is_closed(spec, path, 1e-9)


def test_deck_word_rejects_odd_word():
    with pytest.raises(ValidationError):
        cov.DeckWord((1, 2, 3))


@pytest.mark.parametrize("k", [1, 2])
def test_generator_loops_close(k):
    spec = cov.CoverSpec(k)
    loops = cov.generator_loops(spec)
    assert len(loops) == 2 * (k + 1)
    for loop in loops:
        assert cov.loop_is_closed(spec, loop, 1e-9)


def test_generator_loop_labels():
    spec = cov.CoverSpec(1)
    labels = [p.label for p in cov.generator_loops(spec)]
    assert "k1^0*gamma" in labels and "k1^0*k2*gamma" in labels


# ---------------------------------------------------------------------------
# reduced curve and genus bookkeeping
# ---------------------------------------------------------------------------

def test_double_cover_projection_on_curve():
    spec = cov.CoverSpec(2)
    p = cov.solve_fiber(spec, 1.8 + 0.4j)
    q = cov.double_cover_project(spec, p)
    assert abs(q.z - p.z * p.z) < 1e-12
    red = cov.CoverSpec(2, reduced=True)
    assert cov.on_cover(red, q, 1e-7)


def test_double_cover_rejects_odd_k():
    spec = cov.CoverSpec(3)
    p = cov.solve_fiber(spec, 1.8 + 0.4j)
    with pytest.raises(ValidationError):
        cov.double_cover_project(spec, p)


@pytest.mark.parametrize("k,genus", [(1, 1), (2, 2), (3, 3), (4, 4)])
def test_genus_full_curve(k, genus):
    assert cov.genus_check(cov.CoverSpec(k))["genus"] == genus


@pytest.mark.parametrize("k,genus", [(2, 1), (4, 2)])
def test_genus_reduced_curve(k, genus):
    assert cov.genus_check(cov.CoverSpec(k, reduced=True))["genus"] == genus


def test_cover_spec_validation():
    with pytest.raises(ValidationError):
        cov.CoverSpec(0)
    with pytest.raises(ValidationError):
        cov.CoverSpec(3, reduced=True)


# ---------------------------------------------------------------------------
# path persistence
# ---------------------------------------------------------------------------

def test_path_csv_round_trip(tmp_path):
    spec = cov.CoverSpec(2)
    o = cov.base_point(spec)
    path = cov.SurfacePath((o.z, 1.5 + 0.5j, 0.5 + 1.2j), o.w, label="probe")
    fname = str(tmp_path / "path.csv")
    cov.save_path_csv(path, fname)
    back = cov.load_path_csv(fname)
    assert back.w0 == pytest.approx(path.w0)
    assert np.allclose(back.z_vertices, path.z_vertices)
