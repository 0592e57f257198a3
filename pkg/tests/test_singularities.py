"""Singular-set tracing and the (alpha, beta) wavefront classification.

Closed-form checks pin alpha on the rotational examples; the structural
counts (swallowtails per oval, cross caps, cone axes) are checked against
independently derived expectations for the catalog surfaces.
"""

import cmath
import math

import numpy as np
import pytest

from maxface import cover as cov
from maxface import periods as per
from maxface import singularities as sng
from maxface import weierstrass as wst

# ---------------------------------------------------------------------------
# alpha, beta closed forms
# ---------------------------------------------------------------------------

def test_alpha_catenoid_closed_form():
    """G = z, eta = dz/z^2: alpha = G'/(G^2 eta) = z^2/z^2 = 1 (real,
    nonzero, beta real) -> cone-axis degeneracy, never a swallowtail."""
    data = wst.catalog_get("catenoid")
    for th in (0.3, 1.1, 2.7):
        p = data.point(cmath.exp(1j * th))
        alpha, beta = sng.alpha_beta(data, p)
        assert alpha == pytest.approx(1.0, abs=1e-12)
        assert abs(beta.imag) < 1e-12


def test_alpha_helicoid_closed_form():
    """Conjugate data eta = i dz/z^2 rotates alpha to -i: purely imaginary
    alpha on the whole circle (fold / cuspidal-edge regime)."""
    data = wst.catalog_get("helicoid")
    p = data.point(cmath.exp(0.9j))
    alpha, _ = sng.alpha_beta(data, p)
    assert alpha.real == pytest.approx(0.0, abs=1e-12)
    assert abs(alpha.imag) == pytest.approx(1.0, abs=1e-12)


def test_classify_point_kinds():
    data = wst.catalog_get("catenoid")
    p = data.point(cmath.exp(0.4j))
    out = sng.classify_point(data, p)
    assert out["kind"] == "degenerate"  # real alpha, real beta: cone axis
    data_h = wst.catalog_get("helicoid")
    out_h = sng.classify_point(data_h, data_h.point(cmath.exp(0.4j)))
    assert out_h["kind"] in ("cuspidal_edge", "degenerate")


def test_associated_family_generic_edge():
    """Strictly between the conjugate pair the edge points are generic."""
    data = wst.catalog_get("associated", phase=0.6)
    p = data.point(cmath.exp(0.8j))
    out = sng.classify_point(data, p)
    assert out["kind"] == "cuspidal_edge"


# ---------------------------------------------------------------------------
# tracing: ovals of the genus family
# ---------------------------------------------------------------------------

def oval_residual_full(z, rho):
    r2 = abs(z) ** 2
    th = cmath.phase(z)
    return abs(r2 + 1.0 / r2 - 2.0 * math.cos(2.0 * th) - rho)


@pytest.mark.parametrize("k", [1, 2])
def test_singular_ovals_on_frozen_curve(k):
    """|G| = 1 on the genus family is r^2 + 1/r^2 - 2 cos 2 theta = rho_k."""
    sol = per.compute_ck(k)
    data = wst.catalog_get("genus_k", k=k, c=sol.c_k)
    comps = sng.trace_singular_set(data)
    assert len(comps) == 2
    for comp in comps:
        assert comp.closed and not comp.partial
        for z in comp.z_vertices[:: max(1, comp.vertex_count // 40)]:
            assert oval_residual_full(complex(z), sol.rho_k) < 1e-7


@pytest.mark.parametrize("k", [2])
def test_singular_oval_reduced(k):
    sol = per.compute_ck(k)
    data = wst.catalog_get("genus_k_reduced", k=k, c=sol.c_k)
    comps = sng.trace_singular_set(data)
    assert len(comps) == 1
    comp = comps[0]
    # reduced coordinate: R + 1/R - 2 cos Theta = rho_k
    for z in comp.z_vertices[:: max(1, comp.vertex_count // 30)]:
        R, Th = abs(complex(z)), cmath.phase(complex(z))
        assert abs(R + 1.0 / R - 2.0 * math.cos(Th) - sol.rho_k) < 1e-7


@pytest.mark.parametrize("k", [1, 2])
def test_genus_family_counts(k):
    """Each oval carries 2(k+1) swallowtails and 2(k+1) cross caps."""
    data = wst.catalog_get("genus_k", k=k, c=per.compute_ck(k).c_k)
    comps = sng.trace_singular_set(data)
    for comp in comps:
        counts = sng.count_singularities(data, comp)
        assert counts["swallowtails"] == 2 * (k + 1)
        assert counts["cross_caps"] == 2 * (k + 1)
        assert counts["degenerate"] == 0


def test_components_carry_cover_lift(genus1):
    comps = sng.trace_singular_set(genus1)
    for comp in comps:
        assert comp.w_vertices is not None
        spec = genus1.cover
        for z, w in list(zip(comp.z_vertices, comp.w_vertices))[::50]:
            assert cov.on_cover(spec, cov.SurfacePoint(complex(z), complex(w)),
                                1e-6)


# ---------------------------------------------------------------------------
# cone example: one degenerate axis, two generic ovals
# ---------------------------------------------------------------------------

def test_cone_structure(cone25):
    comps = sng.trace_singular_set(cone25)
    assert len(comps) == 3
    cones = []
    generic = []
    for comp in comps:
        det = sng.detect_cone_like(cone25, comp)
        (cones if det["cone_like"] else generic).append((comp, det))
    assert len(cones) == 1
    assert len(generic) == 2
    comp, det = cones[0]
    assert det["max_im_alpha"] < 1e-8
    assert det["min_abs_alpha"] > 0.01
    assert det["gauss_winding"] in (1, -1)
    for comp, _ in generic:
        counts = sng.count_singularities(cone25, comp)
        assert counts["swallowtails"] > 0
        assert counts["cross_caps"] > 0


def test_trinoid_counts():
    data = wst.catalog_get("trinoid1", a=3.67)
    comps = sng.trace_singular_set(data)
    sw = sum(sng.count_singularities(data, c)["swallowtails"] for c in comps)
    cc = sum(sng.count_singularities(data, c)["cross_caps"] for c in comps)
    assert sw == 8
    assert cc == 0
    for comp in comps:
        assert not sng.detect_cone_like(data, comp)["cone_like"]


# ---------------------------------------------------------------------------
# robustness of the tracer
# ---------------------------------------------------------------------------

def test_trace_step_halving_consistency(genus1):
    """Halving the predictor step must not change the component count or
    the classified counts."""
    coarse = sng.trace_singular_set(genus1)
    fine = sng.trace_singular_set(genus1, step=genus1.trace_step / 2)
    assert len(coarse) == len(fine)
    c_counts = sorted(
        (sng.count_singularities(genus1, c)["swallowtails"],
         sng.count_singularities(genus1, c)["cross_caps"]) for c in coarse)
    f_counts = sorted(
        (sng.count_singularities(genus1, c)["swallowtails"],
         sng.count_singularities(genus1, c)["cross_caps"]) for c in fine)
    assert c_counts == f_counts


def test_singular_report_shape(cone25):
    rep = sng.singular_report(cone25)
    assert rep["surface"] == "cone"
    assert rep["component_count"] == 3
    labels = {row["label"] for row in rep["components"]}
    assert len(labels) == 3
    assert sum(row["cone_like"] for row in rep["components"]) == 1


def test_traversal_spans_all_circuits(genus1):
    comps = sng.trace_singular_set(genus1)
    comp = comps[0]
    tv = list(comp.traversal())
    assert len(tv) == comp.circuits * comp.vertex_count
    # the traversal is on-curve throughout
    for zh, z, w in tv[:: max(1, len(tv) // 25)]:
        assert cov.on_cover(genus1.cover,
                            cov.SurfacePoint(complex(z), complex(w)), 1e-6)
