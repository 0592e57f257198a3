"""Branched covers  w^(k+1) = z (z^2-1)^k  and their even-k reductions
W^(2m+1) = Z^(m+1) (Z-1)^(2m),  k = 2m.

The cover carries four antiholomorphic reflections mu_1..mu_4 and the
holomorphic automorphisms kappa_1 = mu_2 mu_1, kappa_2 = mu_3 mu_1.  Points
are (z, w) pairs on the algebraic curve; paths are z-polylines together with
the starting w, and w is transported by nearest-root continuation.  Even words
in the reflections that compose to the identity are realized as concrete
closed polylines ("deck word paths"); the homology generators used by the
period solver are kappa-images of one such loop.

Conventions: lam = pi/(k+1), psi = exp(i k lam / 2), base point o = (2, w0)
with w0 the positive real fiber root over z = 2.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContinuationError, ValidationError

BASE_Z = 2.0 + 0.0j


@dataclass(frozen=True)
class CoverSpec:
    """k >= 1 selects w^(k+1) = z(z^2-1)^k; reduced=True (k even, k=2m) selects
    the quotient curve W^(2m+1) = Z^(m+1)(Z-1)^(2m) in the squared coordinate."""

    k: int
    reduced: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("cover needs k >= 1")
        if self.reduced and self.k % 2 != 0:
            raise ValidationError("reduced cover needs even k")

    @property
    def m(self) -> int:
        return self.k // 2

    @property
    def lam(self) -> float:
        return math.pi / (self.k + 1)

    @property
    def psi(self) -> complex:
        return cmath.exp(0.5j * self.k * self.lam)

    @property
    def sheet_count(self) -> int:
        return (2 * self.m + 1) if self.reduced else (self.k + 1)

    @property
    def finite_branch_points(self) -> tuple[complex, ...]:
        return (0j, 1 + 0j) if self.reduced else (0j, 1 + 0j, -1 + 0j)

    def rhs(self, z: complex) -> complex:
        if self.reduced:
            return z ** (self.m + 1) * (z - 1) ** (2 * self.m)
        return z * (z * z - 1) ** self.k

    def fiber(self, z: complex) -> np.ndarray:
        """All sheet_count roots w over z (ill-conditioned at branch points)."""
        n = self.sheet_count
        r = self.rhs(z)
        if r == 0:
            return np.zeros(n, dtype=complex)
        principal = cmath.exp(cmath.log(r) / n)
        units = np.exp(2j * math.pi * np.arange(n) / n)
        return principal * units

    def genus(self) -> int:
        # Riemann-Hurwitz from the branching data; see genus_check.
        return genus_check(self)["genus"]


@dataclass(frozen=True)
class SurfacePoint:
    z: complex
    w: complex | None = None

    def close_to(self, other: "SurfacePoint", tol: float = 1e-9) -> bool:
        if abs(self.z - other.z) > tol * (1 + abs(self.z)):
            return False
        if self.w is None or other.w is None:
            return self.w is other.w
        return abs(self.w - other.w) <= tol * (1 + abs(self.w))


@dataclass
class SurfacePath:
    """z-polyline plus the starting fiber value; the homotopy class is pinned
    by the concrete vertices (after branch-clearance sanitization)."""

    z_vertices: tuple
    w0: complex | None
    label: str = ""
    resolution: int = 8  # initial per-segment subdivision hint

    def __post_init__(self):
        self.z_vertices = tuple(complex(z) for z in self.z_vertices)
        if self.w0 is not None:
            self.w0 = complex(self.w0)
        if len(self.z_vertices) < 1:
            raise ValidationError("path needs at least one vertex")

    @property
    def start(self) -> complex:
        return self.z_vertices[0]

    @property
    def end(self) -> complex:
        return self.z_vertices[-1]


def fiber_residual(spec: CoverSpec, p: SurfacePoint) -> float:
    if p.w is None:
        raise ValidationError("point has no fiber value")
    return abs(p.w ** spec.sheet_count - spec.rhs(p.z))


def on_cover(spec: CoverSpec, p: SurfacePoint, tol: float = 1e-8) -> bool:
    return fiber_residual(spec, p) <= tol * (1.0 + abs(p.z)) ** 3


def solve_fiber(spec: CoverSpec, z: complex, near: complex | None = None) -> SurfacePoint:
    roots = spec.fiber(z)
    if near is None:
        return SurfacePoint(z, roots[0])
    i = int(np.argmin(np.abs(roots - near)))
    return SurfacePoint(z, roots[i])


@lru_cache(maxsize=64)
def base_point(spec: CoverSpec) -> SurfacePoint:
    roots = spec.fiber(BASE_Z)
    i = int(np.argmin(np.abs(np.angle(roots))))
    w0 = roots[i]
    assert abs(w0.imag) < 1e-12 and w0.real > 0
    return SurfacePoint(BASE_Z, w0)


def clearance(spec: CoverSpec) -> float:
    pts = spec.finite_branch_points
    dmin = min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]) if len(pts) > 1 else 1.0
    return 0.05 * dmin


def _seg_point_dist(a: complex, b: complex, p: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(p - a)
    t = max(0.0, min(1.0, ((p - a).conjugate() * ab).real / denom))
    return abs(a + t * ab - p)


def sanitize_path(spec: CoverSpec, vertices) -> tuple:
    """Insert a counterclockwise semicircular detour wherever a segment passes
    a finite branch point closer than the clearance radius.

    A segment that grazes several branch points is split recursively so each
    offender gets its own arc; the pieces on either side of a detour are
    re-examined against the remaining branch points."""
    clr = clearance(spec)

    def detour(a: complex, b: complex, seen: frozenset) -> list:
        # vertices strictly after a, ending with b
        for bp in spec.finite_branch_points:
            if bp in seen:
                continue
            if (_seg_point_dist(a, b, bp) < clr
                    and abs(a - bp) > 1e-14 and abs(b - bp) > 1e-14):
                ab = b - a
                t = (((bp - a).conjugate() * ab).real) / abs(ab) ** 2
                t = max(0.0, min(1.0, t))
                # entry/exit points on the segment at clearance distance
                back = max(0.0, t - 2 * clr / abs(ab))
                fwd = min(1.0, t + 2 * clr / abs(ab))
                pin = a + back * ab
                pout = a + fwd * ab
                # counterclockwise arc of radius clr around the offender;
                # pin -> arc[0] and arc[-1] -> pout are radial joints
                th_in = cmath.phase(pin - bp)
                th_out = cmath.phase(pout - bp)
                while th_out <= th_in:
                    th_out += 2 * math.pi
                arc = [bp + clr * cmath.exp(1j * (th_in + s * (th_out - th_in)))
                       for s in np.linspace(0.0, 1.0, 9)]
                mark = seen | {bp}
                return detour(a, pin, mark) + arc + detour(pout, b, mark)
        return [b]

    out = [complex(vertices[0])]
    for a, b in zip(vertices[:-1], vertices[1:]):
        out.extend(detour(complex(a), complex(b), frozenset()))
    # drop consecutive duplicates
    dedup = [out[0]]
    for v in out[1:]:
        if abs(v - dedup[-1]) > 1e-14:
            dedup.append(v)
    return tuple(dedup)


def _continue_segment(spec: CoverSpec, z0: complex, z1: complex, w: complex,
                      record=None) -> complex:
    """Nearest-root transport of w from z0 to z1, doubling the subdivision
    until the chosen root is more than twice as close as any competitor."""
    n = 4
    while True:
        ok = True
        wcur = w
        pts = [(0.0, w)]
        for i in range(1, n + 1):
            s = i / n
            roots = spec.fiber(z0 + (z1 - z0) * s)
            d = np.abs(roots - wcur)
            order = np.argsort(d)
            if len(roots) > 1 and not (d[order[1]] > 2.0 * d[order[0]]):
                ok = False
                break
            wcur = complex(roots[order[0]])
            pts.append((s, wcur))
        if ok:
            if record is not None:
                record.extend(pts)
            return wcur
        n *= 2
        if n > 1 << 16:
            raise ContinuationError(
                f"fiber continuation stalled on segment {z0} -> {z1}"
            )


def continue_path(spec: CoverSpec, path: SurfacePath) -> SurfacePoint:
    """Transport the starting fiber value along the whole polyline."""
    if path.w0 is None:
        raise ValidationError("path carries no fiber value")
    verts = sanitize_path(spec, path.z_vertices)
    w = path.w0
    for a, b in zip(verts[:-1], verts[1:]):
        w = _continue_segment(spec, a, b, w)
    return SurfacePoint(verts[-1], w)


class LiftedPath:
    """A sanitized polyline with per-segment w checkpoints, able to answer
    w at any point along any segment (seed by interpolation, snap to the
    nearest exact fiber root)."""

    def __init__(self, spec: CoverSpec, path: SurfacePath):
        self.spec = spec
        self.vertices = sanitize_path(spec, path.z_vertices)
        self.legs = []  # (z0, z1, s_nodes, w_nodes)
        w = path.w0
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            if w is None:
                self.legs.append((a, b, None, None))
                continue
            rec: list = []
            w = _continue_segment(spec, a, b, w, record=rec)
            s_nodes = np.array([s for s, _ in rec])
            w_nodes = np.array([wv for _, wv in rec])
            self.legs.append((a, b, s_nodes, w_nodes))
        self.w_end = w

    def endpoint(self) -> SurfacePoint:
        return SurfacePoint(self.vertices[-1], self.w_end)

    def w_at(self, leg: int, s: float) -> complex | None:
        z0, z1, s_nodes, w_nodes = self.legs[leg]
        if s_nodes is None:
            return None
        z = z0 + (z1 - z0) * s
        i = int(np.searchsorted(s_nodes, s))
        i = max(1, min(i, len(s_nodes) - 1))
        t = (s - s_nodes[i - 1]) / (s_nodes[i] - s_nodes[i - 1])
        seed = w_nodes[i - 1] * (1 - t) + w_nodes[i] * t
        roots = self.spec.fiber(z)
        return complex(roots[int(np.argmin(np.abs(roots - seed)))])


# ---------------------------------------------------------------------------
# reflections and automorphisms
# ---------------------------------------------------------------------------

def reflection_apply(spec: CoverSpec, j: int, p: SurfacePoint) -> SurfacePoint:
    """The antiholomorphic reflections mu_1..mu_4 of the full cover."""
    if spec.reduced:
        raise ValidationError("reflections are defined on the full cover")
    z, w = p.z, p.w
    k, lam = spec.k, spec.lam
    zb, wb = z.conjugate(), (w.conjugate() if w is not None else None)
    if j == 1:
        return SurfacePoint(zb, wb)
    if j == 2:
        return SurfacePoint(zb, cmath.exp(1j * (2 * k * lam)) * wb if wb is not None else None)
    if j == 3:
        return SurfacePoint(-zb, cmath.exp(-1j * lam) * wb if wb is not None else None)
    if j == 4:
        if z == 0:
            raise ValidationError("mu_4 undefined over z=0")
        return SurfacePoint(1.0 / zb,
                            cmath.exp(1j * k * lam) * wb / zb ** 2 if wb is not None else None)
    raise ValidationError(f"reflection index must be 1..4, got {j}")


def reflection_zmap(j: int):
    if j in (1, 2):
        return lambda z: z.conjugate()
    if j == 3:
        return lambda z: -z.conjugate()
    if j == 4:
        return lambda z: 1.0 / z.conjugate()
    raise ValidationError(f"reflection index must be 1..4, got {j}")


def kappa1_apply(spec: CoverSpec, p: SurfacePoint, j: int = 1) -> SurfacePoint:
    """kappa_1^j = (mu_2 mu_1)^j : (z, w) -> (z, e^{2jk i lam} w)."""
    ph = cmath.exp(1j * (2 * j * spec.k * spec.lam))
    return SurfacePoint(p.z, ph * p.w if p.w is not None else None)


def kappa2_apply(spec: CoverSpec, p: SurfacePoint) -> SurfacePoint:
    """kappa_2 = mu_3 mu_1 : (z, w) -> (-z, e^{-i lam} w)."""
    return SurfacePoint(-p.z, cmath.exp(-1j * spec.lam) * p.w if p.w is not None else None)


def transform_path(spec: CoverSpec, path: SurfacePath, zmap, w0: complex,
                   label: str = "") -> SurfacePath:
    return SurfacePath(tuple(zmap(z) for z in path.z_vertices), w0,
                       label or path.label)


# ---------------------------------------------------------------------------
# the concrete reflection connectors P_j : o -> mu_j(o)
# ---------------------------------------------------------------------------

_P2_HALF = (2.0 + 0.0j, 1.6 + 0.6j, 1.0 + 0.7j, 0.5 + 0.4j, 0.5 + 0.0j)
_P3_HALF = (2.0 + 0.0j, 1.4 + 1.1j, 0.6 + 1.5j, 0.0 + 1.6j)


def base_connectors(spec: CoverSpec) -> dict:
    """P_j with mu_j-symmetric polylines: P_j(1-u) = mu_j(P_j(u)).

    P_1 is constant (o is mu_1-fixed).  P_2 winds once counterclockwise about
    z=1, crossing the slit (0,1) at z=1/2; P_3 crosses the imaginary axis at
    z=1.6i on its way to -2.  P_4 is not needed by the word calculus.
    """
    if spec.reduced:
        raise ValidationError("connectors live on the full cover")
    o = base_point(spec)
    p2 = _P2_HALF + tuple(z.conjugate() for z in reversed(_P2_HALF[:-1]))
    p3 = _P3_HALF + tuple(-z.conjugate() for z in reversed(_P3_HALF[:-1]))
    return {
        1: SurfacePath((o.z,), o.w, label="P_mu1"),
        2: SurfacePath(p2, o.w, label="P_mu2"),
        3: SurfacePath(p3, o.w, label="P_mu3"),
    }


# ---------------------------------------------------------------------------
# deck words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeckWord:
    """Even word in the reflection indices {1,2,3} composing to the identity
    deck transformation; realized as a closed path by chaining transformed
    connectors."""

    indices: tuple

    def __post_init__(self):
        if len(self.indices) % 2 != 0:
            raise ValidationError("deck words must have even length")
        if any(i not in (1, 2, 3) for i in self.indices):
            raise ValidationError("deck words use reflection indices 1..3 only")


def word_end_zero(k: int) -> DeckWord:
    return DeckWord((3, 2) * (2 * (k + 1)))


def word_end_infinity(k: int) -> DeckWord:
    return DeckWord((1, 3) * (2 * (k + 1)))


def word_base_loop() -> DeckWord:
    return DeckWord((3, 2, 3, 1))


def word_generator(j: int, with_kappa2: bool) -> DeckWord:
    core = (3, 1, 3, 2) if with_kappa2 else (3, 2, 3, 1)
    return DeckWord((2, 1) * j + core + (1, 2) * j)


def _word_is_identity(spec: CoverSpec, word: DeckWord) -> bool:
    rng = np.random.default_rng(7)
    for _ in range(3):
        z = complex(rng.uniform(1.5, 2.5), rng.uniform(0.2, 0.8))
        p = solve_fiber(spec, z)
        q = p
        for i in reversed(word.indices):  # innermost map acts first
            q = reflection_apply(spec, i, q)
        if not q.close_to(p, 1e-10):
            return False
    return True


def deck_word_path(spec: CoverSpec, word: DeckWord) -> SurfacePath:
    """Realize the identity word (i1..i2r) as the closed loop

        P_{i1} * (mu_{i1} o P_{i2}) * (mu_{i1} mu_{i2} o P_{i3}) * ...

    based at o.  Raises ValidationError if the word does not compose to the
    identity deck transformation.
    """
    if not _word_is_identity(spec, word):
        raise ValidationError(f"word {word.indices} is not an identity deck word")
    o = base_point(spec)
    conns = base_connectors(spec)
    verts: list[complex] = [o.z]
    # cumulative z-map of mu_{i1} ... mu_{i_{j-1}}
    maps: list = []

    def apply_maps(z: complex) -> complex:
        for f in reversed(maps):
            z = f(z)
        return z

    for idx in word.indices:
        leg = conns[idx]
        img = [apply_maps(z) for z in leg.z_vertices]
        if abs(img[0] - verts[-1]) > 1e-12:
            raise ValidationError("deck word legs do not chain")
        verts.extend(img[1:])
        maps.append(reflection_zmap(idx))
    if abs(verts[-1] - verts[0]) > 1e-12:
        raise ValidationError("deck word path failed to close in z")
    return SurfacePath(tuple(verts), o.w, label="word:" + "".join(map(str, word.indices)))


def generator_loops(spec: CoverSpec) -> list[SurfacePath]:
    """The 2(k+1) homology generator loops: kappa_1^j and kappa_1^j kappa_2
    images of the concrete base loop, j = 0..k."""
    gamma = deck_word_path(spec, word_base_loop())
    o = base_point(spec)
    loops = []
    for j in range(spec.k + 1):
        w_j = o.w * cmath.exp(1j * (2 * j * spec.k * spec.lam))
        loops.append(SurfacePath(gamma.z_vertices, w_j, label=f"k1^{j}*gamma"))
        w_j2 = w_j * cmath.exp(-1j * spec.lam)
        loops.append(SurfacePath(tuple(-z for z in gamma.z_vertices), w_j2,
                                 label=f"k1^{j}*k2*gamma"))
    return loops


def loop_is_closed(spec: CoverSpec, path: SurfacePath, tol: float = 1e-9) -> bool:
    if abs(path.start - path.end) > 1e-12:
        return False
    end = continue_path(spec, path)
    return abs(end.w - path.w0) <= tol * (1 + abs(path.w0))


def winding_number(vertices, z0: complex) -> float:
    """Total winding of the polyline about z0 (in turns; integer when closed)."""
    total = 0.0
    for a, b in zip(vertices[:-1], vertices[1:]):
        total += cmath.phase((b - z0) / (a - z0))
    return total / (2 * math.pi)


# ---------------------------------------------------------------------------
# reduction to the squared coordinate
# ---------------------------------------------------------------------------

def double_cover_project(spec: CoverSpec, p: SurfacePoint) -> SurfacePoint:
    """Project the full even-k cover to the reduced curve: (z, w) -> (z^2, z w).

    On-curve check: (zw)^(2m+1) = z^(2m+1) w^(2m+1) = z^(2m+1) z (z^2-1)^(2m)
    = (z^2)^(m+1) (z^2-1)^(2m)."""
    if spec.reduced:
        raise ValidationError("point already lives on the reduced curve")
    if spec.k % 2 != 0:
        raise ValidationError("reduction needs even k")
    q = SurfacePoint(p.z * p.z, p.z * p.w if p.w is not None else None)
    red = CoverSpec(spec.k, reduced=True)
    if q.w is not None and not on_cover(red, q, 1e-7):
        raise ContinuationError("projection left the reduced curve")
    return q


def genus_check(spec: CoverSpec) -> dict:
    """Riemann-Hurwitz bookkeeping for the cover (degree, total branching,
    genus), from the local ramification structure."""
    if spec.reduced:
        deg = 2 * spec.m + 1
        # Z=0: gcd(m+1, 2m+1)=1 -> one point, ram 2m; Z=1: gcd(2m,2m+1)=1 -> 2m;
        # Z=inf: full ramification again
        branching = 3 * (deg - 1)
        n_branch = 3
    else:
        deg = spec.k + 1
        # z=0 and z=inf: full ramification (k); z=+-1: gcd(k, k+1)=1 -> full (k)
        branching = 4 * spec.k
        n_branch = 4
    genus = (branching - 2 * deg + 2) // 2
    return {"degree": deg, "branch_points": n_branch,
            "total_branching": branching, "genus": genus}


# ---------------------------------------------------------------------------
# path CSV i/o
# ---------------------------------------------------------------------------

def save_path_csv(path: SurfacePath, filename: str) -> None:
    with open(filename, "w", newline="") as fh:
        if path.w0 is not None:
            fh.write(f"# initial_w = {path.w0.real!r} {path.w0.imag!r}\n")
        else:
            fh.write("# initial_w = none\n")
        writer = csv.writer(fh)
        writer.writerow(["re_z", "im_z"])
        for z in path.z_vertices:
            writer.writerow([repr(z.real), repr(z.imag)])


def load_path_csv(filename: str) -> SurfacePath:
    with open(filename, newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# initial_w"):
            raise ValidationError("path csv missing initial_w header")
        tail = first.split("=", 1)[1].strip()
        w0 = None
        if tail != "none":
            re_s, im_s = tail.split()
            w0 = complex(float(re_s), float(im_s))
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["re_z", "im_z"]:
            raise ValidationError("path csv has unexpected columns")
        verts = [complex(float(r[0]), float(r[1])) for r in reader if r]
    return SurfacePath(tuple(verts), w0)
