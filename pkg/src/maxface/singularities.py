"""Singular-set tracing and pointwise classification.

A point of the immersion is singular iff |G| = 1.  Along the singular curve
the local diffeomorphism type is decided by two complex invariants

    alpha = G' / (G^2 eta_hat),        beta = G alpha' / G' ,

with the scale-aware threshold eps = 1e-7 (1 + |alpha| + |beta|):

    swallowtail         |Im alpha| < eps, |alpha| > eps, |Re beta| > eps
    cuspidal cross cap  |Re alpha| < eps, |alpha| > eps, |Im beta| > eps
    cuspidal edge       |Im alpha| > eps and |Re alpha| > eps
    degenerate          anything else pointwise

Curves are traced in a Moebius chart zhat (so components through z = infinity
become bounded) by a predictor-corrector walk on phi = log|G|, whose chart
gradient is conj(H') with H' = (G'/G) dz/dzhat.  Components on a branched
cover are lifted by analytic continuation of w; a z-circuit that permutes the
sheets closes only after several circuits, and singular points are counted on
the full lifted traversal.

Cone-like components are recognized at component level (alpha real and
bounded away from zero along the whole curve, G winding +-1, eta_hat bounded
away from zero in chart values); fold candidates are the purely imaginary
analogue.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import cover as cov
from . import weierstrass as wst
from .errors import DegenerateError, NumericalError, ValidationError

_CLASS_EPS = 1e-7


# ---------------------------------------------------------------------------
# pointwise invariants
# ---------------------------------------------------------------------------

def alpha_beta(data: wst.WeierstrassData, p: cov.SurfacePoint) -> tuple[complex, complex]:
    """The classification pair (alpha, beta) at a surface point."""
    g = data.G(p)
    dg = data.dG(p)
    d2g = data.d2G(p)
    e = data.eta(p)
    de = data.deta(p)
    denom = g * g * e
    if denom == 0:
        raise DegenerateError("alpha undefined: G^2 eta vanishes")
    alpha = dg / denom
    dalpha = (d2g - alpha * (2.0 * g * dg * e + g * g * de)) / denom
    beta = g * dalpha / dg if dg != 0 else complex("nan")
    return complex(alpha), complex(beta)


def classify_point(data: wst.WeierstrassData, p: cov.SurfacePoint,
                   eps_scale: float = _CLASS_EPS) -> dict:
    """Classify one singular point; caller is responsible for |G| = 1."""
    alpha, beta = alpha_beta(data, p)
    b_ok = not (math.isnan(beta.real) or math.isnan(beta.imag))
    eps = eps_scale * (1.0 + abs(alpha) + (abs(beta) if b_ok else 0.0))
    if abs(alpha.imag) < eps and abs(alpha) > eps and b_ok and abs(beta.real) > eps:
        kind = "swallowtail"
    elif abs(alpha.real) < eps and abs(alpha) > eps and b_ok and abs(beta.imag) > eps:
        kind = "cuspidal_cross_cap"
    elif abs(alpha.imag) > eps and abs(alpha.real) > eps:
        kind = "cuspidal_edge"
    else:
        kind = "degenerate"
    return {"kind": kind, "alpha": alpha, "beta": beta, "eps": eps}


@dataclass(frozen=True)
class SingularPointRecord:
    kind: str
    zhat: complex
    z: complex
    w: complex | None
    alpha: complex
    beta: complex


@dataclass
class SingularComponent:
    label: str
    zhat_vertices: np.ndarray          # one chart circuit, no repeated endpoint
    z_vertices: np.ndarray             # same circuit in the z coordinate
    w_vertices: np.ndarray | None      # full lifted traversal (circuits x n)
    circuits: int                      # z-circuits needed to close on the cover
    closed: bool
    partial: bool
    chart_name: str = "identity"

    @property
    def vertex_count(self) -> int:
        return len(self.zhat_vertices)

    def traversal(self):
        """(zhat, z, w) over the full lifted closed traversal."""
        n = self.vertex_count
        for c in range(self.circuits):
            for i in range(n):
                w = self.w_vertices[c * n + i] if self.w_vertices is not None else None
                yield self.zhat_vertices[i], self.z_vertices[i], w


# ---------------------------------------------------------------------------
# the z-only trace profile
# ---------------------------------------------------------------------------

class _Profile:
    """phi = log|G|, H' = (G'/G), |eta_hat| as functions of z alone.

    |G| never depends on the fiber point (|w| is a function of z on every
    cover in use), and G'/G is a w-free ratio, so a singular curve can be
    traced entirely in the base coordinate."""

    def __init__(self, data: wst.WeierstrassData):
        self.data = data
        self.spec = data.cover

    def _pt(self, z: complex) -> cov.SurfacePoint:
        if self.spec is None:
            return cov.SurfacePoint(z, None)
        return cov.SurfacePoint(z, self.spec.fiber(z)[0])

    def phi(self, z: complex) -> float:
        try:
            with np.errstate(all="ignore"):
                g = abs(self.data.G(self._pt(z)))
        except (ZeroDivisionError, OverflowError, ValueError):
            return math.nan
        if not (g > 0.0) or math.isinf(g):
            return math.nan if (math.isnan(g) or math.isinf(g)) else -math.inf
        return math.log(g)

    def hprime(self, z: complex) -> complex:
        p = self._pt(z)
        return self.data.dG(p) / self.data.G(p)

    def eta_abs(self, z: complex) -> float:
        return abs(self.data.eta(self._pt(z)))


# ---------------------------------------------------------------------------
# tracing
# ---------------------------------------------------------------------------

def _phi_hat(prof: _Profile, chart: wst.TraceChart, zh: complex) -> float:
    try:
        z = chart.to_z(zh)
    except ZeroDivisionError:
        return math.nan
    return prof.phi(z)


def _newton_on_curve(prof: _Profile, chart: wst.TraceChart, zh: complex,
                     tol: float = 1e-13, max_iter: int = 40) -> complex:
    """Project zh onto {phi = 0} by Newton steps along the chart gradient."""
    for _ in range(max_iter):
        v = _phi_hat(prof, chart, zh)
        if math.isnan(v) or math.isinf(v):
            raise NumericalError(f"phi undefined near zhat={zh}")
        if abs(v) < tol:
            return zh
        grad = (prof.hprime(chart.to_z(zh)) * chart.dz_dzhat(zh)).conjugate()
        g2 = abs(grad) ** 2
        if g2 < 1e-24:
            raise DegenerateError(f"vanishing gradient of log|G| at zhat={zh}")
        zh = zh - v * grad / g2
    raise NumericalError(f"corrector stalled at zhat={zh}, residual {v:.2e}")


def _trace_component(prof: _Profile, chart: wst.TraceChart, seed: complex,
                     step: float, max_steps: int, bound: float) -> tuple[np.ndarray, bool, bool]:
    """March the level curve from a corrected seed.  Returns (vertices, closed,
    partial); vertices never repeat the start point."""
    z0 = _newton_on_curve(prof, chart, seed)
    pts = [z0]
    h = step * (1.0 + abs(z0))

    def tangent(zh: complex) -> complex:
        grad = (prof.hprime(chart.to_z(zh)) * chart.dz_dzhat(zh)).conjugate()
        a = abs(grad)
        if a < 1e-12:
            raise DegenerateError(f"vanishing gradient at zhat={zh}")
        return 1j * grad / a

    direction = tangent(z0)
    moved_away = False
    for n in range(max_steps):
        cur = pts[-1]
        t = tangent(cur)
        if (t.real * direction.real + t.imag * direction.imag) < 0:
            t = -t
        # adaptive turn control: halve on sharp turns, let the step relax back
        for _ in range(14):
            try:
                nxt = _newton_on_curve(prof, chart, cur + h * t)
            except (NumericalError, DegenerateError):
                h *= 0.5
                continue
            t_new = tangent(nxt)
            if (t_new.real * t.real + t_new.imag * t.imag) < 0:
                t_new = -t_new
            cosang = max(-1.0, min(1.0, t.real * t_new.real + t.imag * t_new.imag))
            if math.acos(cosang) > 0.45 and h > 1e-6 * (1 + abs(cur)):
                h *= 0.5
                continue
            break
        else:
            return np.array(pts), False, True
        direction = t_new
        d0 = abs(nxt - z0)
        if moved_away and n >= 8 and d0 < 0.9 * h:
            return np.array(pts), True, False
        if d0 > 3.0 * h:
            moved_away = True
        pts.append(nxt)
        h = min(h * 1.25, step * (1.0 + abs(nxt)))
        if abs(nxt.real) > bound or abs(nxt.imag) > bound:
            return np.array(pts), False, True
    return np.array(pts), False, True


def _grid_seeds(prof: _Profile, chart: wst.TraceChart, window: tuple,
                grid_n: int) -> list[complex]:
    """Sign changes of phi on a chart grid, plus a dense scan of the real
    axis (components of conjugation-symmetric data always cross it)."""
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, grid_n)
    ys = np.linspace(y0, y1, grid_n)
    vals = np.full((grid_n, grid_n), np.nan)
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            vals[i, j] = _phi_hat(prof, chart, complex(x, y))
    seeds: list[complex] = []

    def bisect_edge(za: complex, fa: float, zb: complex, fb: float):
        for _ in range(50):
            zm = 0.5 * (za + zb)
            fm = _phi_hat(prof, chart, zm)
            if not math.isfinite(fm):
                return
            if fm == 0.0:
                break
            if (fa < 0) != (fm < 0):
                zb, fb = zm, fm
            else:
                za, fa = zm, fm
        seeds.append(0.5 * (za + zb))

    fin = np.isfinite(vals)
    for i in range(grid_n):
        for j in range(grid_n - 1):
            if fin[i, j] and fin[i, j + 1] and (vals[i, j] < 0) != (vals[i, j + 1] < 0):
                bisect_edge(complex(xs[j], ys[i]), vals[i, j],
                            complex(xs[j + 1], ys[i]), vals[i, j + 1])
    for j in range(grid_n):
        for i in range(grid_n - 1):
            if fin[i, j] and fin[i + 1, j] and (vals[i, j] < 0) != (vals[i + 1, j] < 0):
                bisect_edge(complex(xs[j], ys[i]), vals[i, j],
                            complex(xs[j], ys[i + 1]), vals[i + 1, j])
    # dense 1-d sweep along the real chart axis for small components
    n1 = 8 * grid_n
    xs1 = np.linspace(x0, x1, n1)
    prev_x, prev_f = None, None
    for x in xs1:
        f = _phi_hat(prof, chart, complex(x, 0.0))
        if prev_f is not None and math.isfinite(f) and math.isfinite(prev_f) \
                and (prev_f < 0) != (f < 0):
            bisect_edge(complex(prev_x, 0.0), prev_f, complex(x, 0.0), f)
        prev_x, prev_f = x, f
    return seeds


def _lift_component(spec: cov.CoverSpec, verts_z: np.ndarray) -> tuple[int, np.ndarray]:
    """Continue w around the closed z-circuit until the lift closes.
    Returns (circuits, w at every vertex of the full traversal)."""
    n = len(verts_z)
    loop = list(verts_z) + [verts_z[0]]
    w = spec.fiber(complex(loop[0]))[0]
    all_w = []
    for circuit in range(1, spec.sheet_count + 1):
        for i in range(n):
            all_w.append(w)
            seg = cov.SurfacePath((complex(loop[i]), complex(loop[i + 1])), w)
            w = cov.continue_path(spec, seg).w
        if abs(w - all_w[0]) < 1e-8 * (1 + abs(w)):
            return circuit, np.array(all_w)
    raise NumericalError("singular-curve lift failed to close on the cover")


def _lift_open(spec: cov.CoverSpec, verts_z: np.ndarray) -> np.ndarray:
    w = spec.fiber(complex(verts_z[0]))[0]
    all_w = [w]
    for a, b in zip(verts_z[:-1], verts_z[1:]):
        seg = cov.SurfacePath((complex(a), complex(b)), w)
        w = cov.continue_path(spec, seg).w
        all_w.append(w)
    return np.array(all_w)


def trace_singular_set(data: wst.WeierstrassData, *, step: float | None = None,
                       window: tuple | None = None, grid_n: int | None = None,
                       max_steps: int = 40000) -> list[SingularComponent]:
    """All singular components of the catalog surface inside the chart window."""
    prof = _Profile(data)
    chart = data.chart
    step = step if step is not None else data.trace_step
    win = window if window is not None else data.window
    gn = grid_n if grid_n is not None else data.grid_n
    bound = 1.6 * max(abs(win[0]), abs(win[1]), abs(win[2]), abs(win[3]))
    seeds = _grid_seeds(prof, chart, win, gn)
    comps: list[SingularComponent] = []
    for seed in seeds:
        tol_near = 2.5 * step * (1.0 + abs(seed))
        if any(np.min(np.abs(c.zhat_vertices - seed)) < tol_near for c in comps):
            continue
        try:
            verts, closed, partial = _trace_component(prof, chart, seed, step,
                                                      max_steps, bound)
        except (NumericalError, DegenerateError):
            continue
        if len(verts) < 8:
            continue
        verts_z = np.array([chart.to_z(zh) for zh in verts])
        circuits, w_all = 1, None
        if data.cover is not None:
            if closed:
                circuits, w_all = _lift_component(data.cover, verts_z)
            else:
                w_all = _lift_open(data.cover, verts_z)
        comps.append(SingularComponent(
            label=f"component_{len(comps)}", zhat_vertices=verts,
            z_vertices=verts_z, w_vertices=w_all, circuits=circuits,
            closed=closed, partial=partial, chart_name=chart.name))
    comps.sort(key=lambda c: (-c.vertex_count * c.circuits, c.label))
    for i, c in enumerate(comps):
        c.label = f"component_{i}"
    return comps


# ---------------------------------------------------------------------------
# counting and component-level detection
# ---------------------------------------------------------------------------

def _alpha_along(data: wst.WeierstrassData, comp: SingularComponent) -> list[tuple]:
    out = []
    for zh, z, w in comp.traversal():
        p = cov.SurfacePoint(complex(z), complex(w) if w is not None else None)
        a, b = alpha_beta(data, p)
        out.append((zh, p, a, b))
    return out


def _refine_crossing(data: wst.WeierstrassData, prof: _Profile, comp: SingularComponent,
                     za: complex, zb: complex, wa, comp_fn) -> cov.SurfacePoint:
    """Bisect comp_fn(alpha) = 0 between two traversal vertices, re-projecting
    each midpoint onto the curve (chart coordinates)."""
    chart = data.chart

    def value(zh: complex) -> tuple[float, cov.SurfacePoint]:
        zh = _newton_on_curve(prof, chart, zh)
        z = chart.to_z(zh)
        if data.cover is None:
            p = cov.SurfacePoint(complex(z), None)
        else:
            p = cov.solve_fiber(data.cover, complex(z), near=wa)
        a, _ = alpha_beta(data, p)
        return comp_fn(a), p

    fa, pa = value(za)
    fb, pb = value(zb)
    if (fa < 0) == (fb < 0):
        return pa if abs(fa) < abs(fb) else pb
    for _ in range(60):
        zm = 0.5 * (za + zb)
        fm, pm = value(zm)
        if fm == 0.0 or abs(zb - za) < 1e-14 * (1 + abs(zm)):
            return pm
        if (fa < 0) != (fm < 0):
            zb, fb = zm, fm
        else:
            za, fa = zm, fm
    return pm


def count_singularities(data: wst.WeierstrassData, comp: SingularComponent,
                        eps_scale: float = _CLASS_EPS) -> dict:
    """Classified singular points of one component, located by sign changes
    of Im alpha (swallowtails) and Re alpha (cross caps) along the full
    lifted traversal, refined by on-curve bisection."""
    prof = _Profile(data)
    ring = _alpha_along(data, comp)
    if not comp.closed:
        pairs = list(zip(ring[:-1], ring[1:]))
    else:
        pairs = list(zip(ring, ring[1:] + ring[:1]))
    records: list[SingularPointRecord] = []
    a_scale = max(abs(a) for _, _, a, _ in ring)
    for comp_fn, target in ((lambda a: a.imag, "swallowtail"),
                            (lambda a: a.real, "cuspidal_cross_cap")):
        vals = np.array([comp_fn(a) for _, _, a, _ in ring])
        vmax = float(np.max(np.abs(vals))) if len(vals) else 0.0
        # alpha-relative floor: a component with Im alpha (or Re alpha)
        # identically zero carries only rounding noise in vals
        floor = 1e-8 * vmax + 1e-11 * a_scale
        if vmax <= 1e-10 * a_scale:
            continue
        for (zh0, p0, a0, _), (zh1, p1, a1, _) in pairs:
            v0, v1 = comp_fn(a0), comp_fn(a1)
            if (v0 < 0) == (v1 < 0) or max(abs(v0), abs(v1)) <= floor:
                continue
            p = _refine_crossing(data, prof, comp, zh0, zh1, p0.w, comp_fn)
            cls = classify_point(data, p, eps_scale)
            records.append(SingularPointRecord(
                kind=cls["kind"] if cls["kind"] == target else f"degenerate_{target}",
                zhat=complex(data.chart.from_z(p.z)), z=p.z, w=p.w,
                alpha=cls["alpha"], beta=cls["beta"]))
    # merge duplicates from noisy double crossings
    unique: list[SingularPointRecord] = []
    for r in records:
        dup = any(
            abs(r.z - u.z) < 1e-6 * (1 + abs(r.z))
            and (r.w is None or abs(r.w - u.w) < 1e-6 * (1 + abs(r.w)))
            and r.kind == u.kind
            for u in unique)
        if not dup:
            unique.append(r)
    return {
        "swallowtails": sum(1 for r in unique if r.kind == "swallowtail"),
        "cross_caps": sum(1 for r in unique if r.kind == "cuspidal_cross_cap"),
        "degenerate": sum(1 for r in unique if r.kind.startswith("degenerate")),
        "records": unique,
    }


def detect_cone_like(data: wst.WeierstrassData, comp: SingularComponent,
                     tol: float = 1e-8) -> dict:
    """Component-level criteria.

    cone-like:      alpha real and bounded away from 0 along the curve, the
                    Gauss map winds once around the unit circle, and eta_hat
                    (chart values) is bounded away from 0.
    fold candidate: same with alpha purely imaginary."""
    prof = _Profile(data)
    ring = _alpha_along(data, comp)
    alphas = np.array([a for _, _, a, _ in ring])
    a_scale = float(np.max(np.abs(alphas)))
    max_im = float(np.max(np.abs(alphas.imag)))
    max_re = float(np.max(np.abs(alphas.real)))
    min_abs = float(np.min(np.abs(alphas)))
    # winding of G and chart-eta floor over the traversal
    eta_vals = []
    g_vals = []
    for zh, p, _, _ in ring:
        g_vals.append(data.G(p))
        eta_vals.append(abs(data.eta(p) * data.chart.dz_dzhat(zh)))
    eta_vals = np.array(eta_vals)
    g_vals = np.array(g_vals)
    if comp.closed:
        rolled = np.roll(g_vals, -1)
        winding = float(np.sum(np.angle(rolled / g_vals)) / (2 * math.pi))
    else:
        winding = math.nan
    eta_min, eta_max = float(np.min(eta_vals)), float(np.max(eta_vals))
    w_int = int(round(winding)) if math.isfinite(winding) else 0
    winding_ok = math.isfinite(winding) and abs(winding - w_int) < 1e-6 and abs(w_int) == 1
    base = (comp.closed and not comp.partial
            and min_abs > 1e-6 * (1.0 + a_scale)
            and winding_ok
            and eta_min > 1e-6 * eta_max)
    return {
        "cone_like": bool(base and max_im <= tol * (1.0 + a_scale)),
        "fold_candidate": bool(base and max_re <= tol * (1.0 + a_scale)),
        "max_im_alpha": max_im,
        "max_re_alpha": max_re,
        "min_abs_alpha": min_abs,
        "gauss_winding": w_int if winding_ok else None,
        "eta_chart_min": eta_min,
    }


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def singular_report(data: wst.WeierstrassData, *, step: float | None = None,
                    window: tuple | None = None, grid_n: int | None = None,
                    eps_scale: float = _CLASS_EPS) -> dict:
    comps = trace_singular_set(data, step=step, window=window, grid_n=grid_n)
    rows = []
    for comp in comps:
        counts = count_singularities(data, comp, eps_scale)
        cone = detect_cone_like(data, comp)
        rows.append({
            "label": comp.label,
            "closed": comp.closed,
            "partial": comp.partial,
            "circuits": comp.circuits,
            "vertex_count": comp.vertex_count,
            "swallowtails": counts["swallowtails"],
            "cross_caps": counts["cross_caps"],
            "degenerate": counts["degenerate"],
            "cone_like": cone["cone_like"],
            "fold_candidate": cone["fold_candidate"],
            "gauss_winding": cone["gauss_winding"],
        })
    return {
        "surface": data.name,
        "params": dict(data.params),
        "chart": data.chart.name,
        "component_count": len(comps),
        "components": rows,
    }
