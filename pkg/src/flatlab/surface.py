"""Translation surfaces as Euclidean polygons glued by translations.

A surface is a list of polygons together with a fixed-point-free involution
on (polygon, edge) pairs identifying parallel, equal-length, oppositely
oriented edges.  Square-tiled surfaces are stored combinatorially as a pair
of permutations and materialized to unit squares on demand.

Cone points are found by walking edge gluings around corners (angle
tracing), never by matching coordinates.  All polygon vertices are treated
as marked points; the stratum signature lists the positive cone orders
only.

Note on automorphisms: surfaces with a nontrivial translation automorphism
group are handled as-is; equivalence tests (see flatlab.canonical) quotient
by every translation isomorphism, so automorphisms are invisible there.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

EPS_GEOM = 1e-9

TWO_PI = 2.0 * math.pi


class SurfaceError(ValueError):
    """Raised when a surface violates a structural invariant."""


class InvalidParameterError(ValueError):
    """Raised on bad constructor arguments (e.g. n < 4, disconnected origami)."""


@dataclass(frozen=True)
class Polygon:
    """A simple polygon with vertices listed counterclockwise.

    Edge ``i`` is the segment from ``vertices[i]`` to ``vertices[(i+1) % k]``.
    """

    vertices: np.ndarray  # (k, 2) float array
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise InvalidParameterError("polygon needs at least 3 planar vertices")
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)

    def edge_vector(self, i: int) -> np.ndarray:
        k = len(self.vertices)
        return self.vertices[(i + 1) % k] - self.vertices[i]

    def signed_area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def interior_angle(self, i: int) -> float:
        """Interior angle at vertex i, in (0, 2*pi)."""
        k = len(self.vertices)
        a = self.vertices[(i + 1) % k] - self.vertices[i]
        b = self.vertices[(i - 1) % k] - self.vertices[i]
        ang = math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])
        if ang <= 0:
            ang += TWO_PI
        return ang

    def is_convex(self, eps: float = EPS_GEOM) -> bool:
        k = len(self.vertices)
        scale = max(1.0, float(np.abs(self.vertices).max()))
        for i in range(k):
            a = self.edge_vector(i)
            b = self.edge_vector((i + 1) % k)
            if a[0] * b[1] - a[1] * b[0] < -eps * scale:
                return False
        return True


@dataclass(frozen=True)
class Origami:
    """A square-tiled surface given by horizontal and vertical permutations.

    ``h[i]`` is the square to the right of square ``i`` and ``v[i]`` the
    square above it (0-indexed image form).
    """

    h: tuple
    v: tuple

    def __post_init__(self):
        h, v = tuple(self.h), tuple(self.v)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "v", v)
        n = len(h)
        if len(v) != n or sorted(h) != list(range(n)) or sorted(v) != list(range(n)):
            raise InvalidParameterError("h and v must be permutations of 0..N-1")

    @property
    def n_squares(self) -> int:
        return len(self.h)

    def is_connected(self) -> bool:
        n = self.n_squares
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in (self.h[i], self.v[i],
                      self.h.index(i), self.v.index(i)):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == n

    @staticmethod
    def from_cycles(n: int, h_cycles, v_cycles) -> "Origami":
        def perm(cycles):
            p = list(range(n))
            for cyc in cycles:
                for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                    p[a] = b
            return tuple(p)
        return Origami(perm(h_cycles), perm(v_cycles))

    def to_json_dict(self) -> dict:
        return {"n": self.n_squares,
                "h": [i + 1 for i in self.h],
                "v": [i + 1 for i in self.v]}

    @staticmethod
    def from_json_dict(d: dict) -> "Origami":
        return Origami(tuple(i - 1 for i in d["h"]), tuple(i - 1 for i in d["v"]))


@dataclass(frozen=True)
class StratumSignature:
    """Multiset of zero orders; empty when the surface is a flat torus cover."""

    zero_orders: tuple
    hyperelliptic_flag: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "zero_orders",
                           tuple(sorted(self.zero_orders, reverse=True)))

    @property
    def genus(self) -> int:
        return sum(self.zero_orders) // 2 + 1

    def __str__(self):
        inner = ",".join(str(k) for k in self.zero_orders)
        return "H(" + inner + ")"


class TranslationSurface:
    """Polygons plus a translation gluing of their edges.

    Immutable after construction; derived combinatorial data (corner orbits,
    cone angles, genus) is computed once and cached.
    """

    def __init__(self, polygons, gluing, eps: float = EPS_GEOM,
                 origami: Origami | None = None, check: bool = True):
        self.polygons = [p if isinstance(p, Polygon) else Polygon(np.asarray(p, float))
                         for p in polygons]
        self.gluing = dict(gluing)
        self.eps = float(eps)
        self.origami = origami
        self._cache = {}
        if check:
            report = validate(self)
            if report:
                raise SurfaceError("invalid surface: " + "; ".join(report))

    # -- basic combinatorics -------------------------------------------------

    def edges(self):
        for p, poly in enumerate(self.polygons):
            for i in range(len(poly)):
                yield (p, i)

    def edge_vector(self, edge) -> np.ndarray:
        p, i = edge
        return self.polygons[p].edge_vector(i)

    def next_corner(self, corner):
        """Next corner counterclockwise around the same vertex class."""
        p, i = corner
        k = len(self.polygons[p])
        return self.gluing[(p, (i - 1) % k)]

    def corner_orbits(self):
        """Vertex classes as lists of corners, each with its cone angle."""
        if "orbits" in self._cache:
            return self._cache["orbits"]
        seen = set()
        orbits = []
        for corner in self.edges():   # corners are indexed like edges
            if corner in seen:
                continue
            orbit = []
            c = corner
            while c not in seen:
                seen.add(c)
                orbit.append(c)
                c = self.next_corner(c)
            angle = sum(self.polygons[p].interior_angle(i) for p, i in orbit)
            orbits.append((orbit, angle))
        self._cache["orbits"] = orbits
        return orbits

    def vertex_class_index(self):
        """Map corner -> index of its vertex class."""
        if "vclass" in self._cache:
            return self._cache["vclass"]
        idx = {}
        for j, (orbit, _angle) in enumerate(self.corner_orbits()):
            for c in orbit:
                idx[c] = j
        self._cache["vclass"] = idx
        return idx

    @property
    def n_vertex_classes(self) -> int:
        return len(self.corner_orbits())

    @property
    def n_edge_classes(self) -> int:
        return len(self.gluing) // 2

    def genus(self) -> int:
        chi = self.n_vertex_classes - self.n_edge_classes + len(self.polygons)
        if chi % 2:
            raise SurfaceError("odd Euler characteristic")
        return (2 - chi) // 2

    def cone_orders(self):
        """Cone order k (angle 2*pi*(k+1)) per vertex class, in class order."""
        orders = []
        for orbit, angle in self.corner_orbits():
            ratio = angle / TWO_PI
            k = round(ratio) - 1
            if abs(ratio - round(ratio)) > 100 * self.eps or k < 0:
                raise SurfaceError(
                    f"cone angle {angle} is not a positive multiple of 2*pi")
            orders.append(k)
        return orders

    def area(self) -> float:
        return sum(p.signed_area() for p in self.polygons)

    def scale(self) -> float:
        return max(float(np.linalg.norm(self.edge_vector(e))) for e in self.edges())

    # -- serialization --------------------------------------------------------

    def to_json_dict(self) -> dict:
        pairs = sorted((min(a, b), max(a, b)) for a, b in self.gluing.items())
        return {
            "polygons": [p.vertices.tolist() for p in self.polygons],
            "gluings": [[list(a), list(b)] for a, b in sorted(set(pairs))],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json_dict(d: dict) -> "TranslationSurface":
        gluing = {}
        for (a, b) in d["gluings"]:
            a, b = tuple(a), tuple(b)
            gluing[a] = b
            gluing[b] = a
        return TranslationSurface(d["polygons"], gluing)

    @staticmethod
    def from_json(s: str) -> "TranslationSurface":
        return TranslationSurface.from_json_dict(json.loads(s))

    def __repr__(self):
        return (f"TranslationSurface({len(self.polygons)} polygons, "
                f"genus {self.genus()}, {stratum(self)})")


# -- validation ---------------------------------------------------------------

def validate(s: TranslationSurface) -> list:
    """Diagnostics for every violated invariant; empty iff the surface is valid."""
    report = []
    edges = set()
    for p, poly in enumerate(s.polygons):
        if poly.signed_area() <= 0:
            report.append(f"polygon {p} is not counterclockwise")
        if _self_intersects(poly, s.eps):
            report.append(f"polygon {p} is not simple")
        for i in range(len(poly)):
            edges.add((p, i))

    for e in edges:
        if e not in s.gluing:
            report.append(f"edge {e} is unglued")
    for a, b in s.gluing.items():
        if a not in edges or b not in edges:
            report.append(f"gluing references missing edge {a}->{b}")
            continue
        if a == b:
            report.append(f"gluing fixes edge {a}: not an involution")
        if s.gluing.get(b) != a:
            report.append(f"gluing not involution at {a}")
            continue
        va, vb = s.edge_vector(a), s.edge_vector(b)
        la, lb = np.linalg.norm(va), np.linalg.norm(vb)
        if abs(la - lb) > s.eps * max(1.0, la):
            report.append(f"edge length mismatch at {a}~{b}")
        elif np.linalg.norm(va + vb) > s.eps * max(1.0, la):
            report.append(f"glued edges {a}~{b} not antiparallel")

    if report:
        return report   # angle tracing needs a consistent gluing

    if not _is_connected(s):
        report.append("surface is disconnected")
        return report

    try:
        orders = s.cone_orders()
        g = s.genus()
        if sum(orders) != 2 * g - 2:
            report.append("cone orders do not sum to 2g-2")
    except SurfaceError as exc:
        report.append(str(exc))
    return report


def _self_intersects(poly: Polygon, eps: float) -> bool:
    v = poly.vertices
    k = len(v)
    scale = max(1.0, float(np.abs(v).max()))
    for i in range(k):
        a0, a1 = v[i], v[(i + 1) % k]
        for j in range(i + 1, k):
            if j == i or (j + 1) % k == i or (i + 1) % k == j:
                continue
            b0, b1 = v[j], v[(j + 1) % k]
            if _segments_cross(a0, a1, b0, b1, eps * scale):
                return True
    return False


def _segments_cross(a0, a1, b0, b1, tol) -> bool:
    d1, d2 = a1 - a0, b1 - b0
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(den) < tol * tol:
        return False
    r = b0 - a0
    t = (r[0] * d2[1] - r[1] * d2[0]) / den
    u = (r[0] * d1[1] - r[1] * d1[0]) / den
    return tol < t < 1 - tol and tol < u < 1 - tol


def _is_connected(s: TranslationSurface) -> bool:
    n = len(s.polygons)
    seen = {0}
    stack = [0]
    while stack:
        p = stack.pop()
        for i in range(len(s.polygons[p])):
            q, _ = s.gluing[(p, i)]
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return len(seen) == n


# -- constructors ---------------------------------------------------------------

def build_regular_2ngon(n: int) -> TranslationSurface:
    """Regular 2n-gon with unit edges, one horizontal edge pair, opposite
    sides glued by translation.

    Examples: n=5 gives the decagon surface in H(1,1) (genus 2); n=6 the
    12-gon in H(4) (genus 3).
    """
    if n < 4:
        raise InvalidParameterError("build_regular_2ngon requires n >= 4")
    r = 1.0 / (2.0 * math.sin(math.pi / (2 * n)))
    base = -math.pi / 2 - math.pi / (2 * n)
    verts = np.array([[r * math.cos(base + k * math.pi / n),
                       r * math.sin(base + k * math.pi / n)]
                      for k in range(2 * n)])
    gluing = {}
    for k in range(2 * n):
        gluing[(0, k)] = (0, (k + n) % (2 * n))
    return TranslationSurface([Polygon(verts, label=f"{2*n}-gon")], gluing)


def build_origami(o: Origami) -> TranslationSurface:
    """Materialize an origami as N unit squares.

    Square i's right edge glues to square h(i)'s left edge, its top edge to
    square v(i)'s bottom edge.  Edges per square: 0 bottom, 1 right, 2 top,
    3 left.
    """
    if not o.is_connected():
        raise InvalidParameterError("origami permutations do not act transitively")
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    polys = [Polygon(square, label=f"sq{i}") for i in range(o.n_squares)]
    gluing = {}
    for i in range(o.n_squares):
        gluing[(i, 1)] = (o.h[i], 3)
        gluing[(o.h[i], 3)] = (i, 1)
        gluing[(i, 2)] = (o.v[i], 0)
        gluing[(o.v[i], 0)] = (i, 2)
    return TranslationSurface(polys, gluing, origami=o)


def stratum(s: TranslationSurface) -> StratumSignature:
    """Zero orders from cone angles; the torus cover case gives H()."""
    orders = tuple(k for k in s.cone_orders() if k > 0)
    hyp = None
    if len(s.polygons) == 1 and s.polygons[0].label.endswith("-gon"):
        hyp = True   # regular 2n-gon family lands in hyperelliptic components
    return StratumSignature(orders, hyperelliptic_flag=hyp)


def origami_stratum_oracle(o: Origami) -> StratumSignature:
    """Zero orders of an origami from the cycle type of the commutator.

    A cycle of length c in h v h^-1 v^-1 contributes a cone point of angle
    2*pi*c, i.e. order c-1.
    """
    n = o.n_squares
    h, v = o.h, o.v
    hinv = [0] * n
    vinv = [0] * n
    for i in range(n):
        hinv[h[i]] = i
        vinv[v[i]] = i
    comm = [h[v[hinv[vinv[i]]]] for i in range(n)]
    seen = [False] * n
    orders = []
    for i in range(n):
        if seen[i]:
            continue
        c = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = comm[j]
            c += 1
        if c > 1:
            orders.append(c - 1)
    return StratumSignature(tuple(orders))


def apply_linear(g, s: TranslationSurface) -> TranslationSurface:
    """Image of the surface under a linear map g in GL+(2,R).

    Vertices map by g; the gluing is unchanged.  Holonomy transforms as
    g composed with the old holonomy.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2):
        raise InvalidParameterError("expected a 2x2 matrix")
    if np.linalg.det(g) <= 0:
        raise InvalidParameterError("matrix must be orientation preserving")
    polys = [Polygon(p.vertices @ g.T, label=p.label) for p in s.polygons]
    return TranslationSurface(polys, s.gluing, eps=s.eps, origami=None)


def triangulated(s: TranslationSurface) -> TranslationSurface:
    """Ear-clip every polygon; diagonals become new glued pairs.

    Used to guarantee convex pieces before operations that need them.
    """
    polys = []
    gluing = {}
    edge_map = {}   # old (p,i) -> new (poly index, edge index)
    for p, poly in enumerate(s.polygons):
        tris = _ear_clip(poly.vertices, s.eps)
        base = len(polys)
        inner = {}
        for t, (ia, ib, ic) in enumerate(tris):
            polys.append(Polygon(poly.vertices[[ia, ib, ic]], label=f"{poly.label}.{t}"))
            for e, (u, w) in enumerate(((ia, ib), (ib, ic), (ic, ia))):
                key = (u, w)
                k = len(poly)
                if (u + 1) % k == w:
                    edge_map[(p, u)] = (base + t, e)
                else:
                    if (w, u) in inner:
                        other = inner.pop((w, u))
                        gluing[(base + t, e)] = other
                        gluing[other] = (base + t, e)
                    else:
                        inner[key] = (base + t, e)
        if inner:
            raise SurfaceError("triangulation bookkeeping failed")
    for a, b in s.gluing.items():
        gluing[edge_map[a]] = edge_map[b]
    return TranslationSurface(polys, gluing, eps=s.eps)


def _ear_clip(vertices: np.ndarray, eps: float):
    """Triangle index triples for a simple ccw polygon."""
    idx = list(range(len(vertices)))
    tris = []
    scale = max(1.0, float(np.abs(vertices).max()))
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * len(vertices) ** 2:
            raise SurfaceError("ear clipping failed to terminate")
        m = len(idx)
        clipped = False
        for j in range(m):
            ia, ib, ic = idx[(j - 1) % m], idx[j], idx[(j + 1) % m]
            a, b, c = vertices[ia], vertices[ib], vertices[ic]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= eps * scale * scale:
                continue
            if any(_point_in_tri(vertices[k], a, b, c, eps * scale)
                   for k in idx if k not in (ia, ib, ic)):
                continue
            tris.append((ia, ib, ic))
            idx.pop(j)
            clipped = True
            break
        if not clipped:
            raise SurfaceError("no ear found; polygon may be degenerate")
    tris.append(tuple(idx))
    return tris


def _point_in_tri(p, a, b, c, tol) -> bool:
    def side(u, v):
        return (v[0] - u[0]) * (p[1] - u[1]) - (v[1] - u[1]) * (p[0] - u[0])
    return side(a, b) > tol and side(b, c) > tol and side(c, a) > tol
