"""Integral homology of a glued-polygon surface and the pairings on it.

All polygon vertices count as marked points, so relative chains live on the
lattice of oriented edge classes modulo polygon-boundary relations.  The
basis is deterministic: edge classes are ordered lexicographically, a
spanning tree of the dual (gluing) graph eliminates one class per non-root
polygon, and the surviving classes form a Z-basis of rank 2g + |Sigma| - 1.

The intersection pairing on cohomology classes is computed exactly by a
Stokes trick: realize a class by per-polygon boundary potentials that are
linear along each edge, then

    <a, b> = sum over polygons of sum_i (h_{i+1} - h_i)(g_i + g_{i+1}) / 2.

This only depends on the absolute parts of the classes and gives the area
form on (Re, Im) of the holonomy.  The cycle intersection matrix follows by
Poincare duality, solved over Fractions so the output is exactly integral.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .surface import SurfaceError, TranslationSurface


class BasisMismatchError(ValueError):
    """Two classes on different bases were combined."""


class HomologyBasis:
    """Relative and absolute homology bases of a translation surface."""

    def __init__(self, s: TranslationSurface):
        self.surface = s
        self._build_classes()
        self._build_relative_basis()
        self._build_absolute_cycles()
        self._fingerprint = None

    # -- edge classes ---------------------------------------------------------

    def _build_classes(self):
        s = self.surface
        reps = []
        for e, partner in s.gluing.items():
            if e <= partner:
                reps.append(e)
        reps.sort()
        self.classes = reps
        self.n_classes = len(reps)
        self.class_of = {}
        for idx, e in enumerate(reps):
            self.class_of[e] = (idx, +1)
            self.class_of[s.gluing[e]] = (idx, -1)

    def edge_chain(self, edge) -> np.ndarray:
        """The chain of a single oriented edge (by its (polygon, index) side)."""
        c = np.zeros(self.n_classes, dtype=np.int64)
        idx, sign = self.class_of[edge]
        c[idx] = sign
        return c

    def face_relation(self, p: int) -> np.ndarray:
        c = np.zeros(self.n_classes, dtype=np.int64)
        for i in range(len(self.surface.polygons[p])):
            idx, sign = self.class_of[(p, i)]
            c[idx] += sign
        return c

    # -- relative basis ---------------------------------------------------------

    def _build_relative_basis(self):
        s = self.surface
        n_poly = len(s.polygons)
        # Spanning tree of the dual graph, edges tried in class order.
        parent = {0: None}
        tree_class_of_poly = {}
        order = [0]
        frontier = True
        while frontier:
            frontier = False
            for idx, e in enumerate(self.classes):
                p, q = e[0], s.gluing[e][0]
                if p in parent and q not in parent:
                    parent[q] = p
                    tree_class_of_poly[q] = idx
                    order.append(q)
                    frontier = True
                elif q in parent and p not in parent:
                    parent[p] = q
                    tree_class_of_poly[p] = idx
                    order.append(p)
                    frontier = True
        if len(parent) != n_poly:
            raise SurfaceError("dual graph is disconnected")

        tree_classes = set(tree_class_of_poly.values())
        self.basis_classes = [i for i in range(self.n_classes) if i not in tree_classes]
        self.rank = len(self.basis_classes)

        expected = 2 * s.genus() + s.n_vertex_classes - 1
        if self.rank != expected:
            raise SurfaceError(
                f"relative rank {self.rank} != 2g + |Sigma| - 1 = {expected}")

        # Express every class over the basis, eliminating tree classes from
        # the deepest polygon inward.
        col = {c: j for j, c in enumerate(self.basis_classes)}
        expr = np.zeros((self.n_classes, self.rank), dtype=np.int64)
        for c, j in col.items():
            expr[c, j] = 1
        resolved = set(self.basis_classes)
        for q in reversed(order[1:]):
            cidx = tree_class_of_poly[q]
            rel = self.face_relation(q)
            coeff = rel[cidx]
            if coeff not in (1, -1):
                raise SurfaceError("tree relation has non-unit pivot")
            rel[cidx] = 0
            acc = np.zeros(self.rank, dtype=np.int64)
            for c in np.nonzero(rel)[0]:
                if c not in resolved:
                    raise SurfaceError("elimination order broken")
                acc += rel[c] * expr[c]
            expr[cidx] = -coeff * acc
            resolved.add(cidx)
        self.expr = expr   # (n_classes, rank): class -> basis coordinates

    def reduce_chain(self, chain: np.ndarray) -> np.ndarray:
        """Basis coordinates of a chain given over all edge classes."""
        return np.asarray(chain) @ self.expr

    # -- absolute cycles ----------------------------------------------------------

    def _class_boundary(self):
        """Tail and head vertex-class per edge class."""
        s = self.surface
        vclass = s.vertex_class_index()
        tails, heads = [], []
        for (p, i) in self.classes:
            k = len(s.polygons[p])
            tails.append(vclass[(p, i)])
            heads.append(vclass[(p, (i + 1) % k)])
        return tails, heads

    def _build_absolute_cycles(self):
        s = self.surface
        tails, heads = self._class_boundary()
        n_v = s.n_vertex_classes

        # Spanning tree of the vertex graph, lexicographic class order.
        parent_edge = {0: None}
        order = [0]
        frontier = True
        while frontier:
            frontier = False
            for idx in range(self.n_classes):
                t, h = tails[idx], heads[idx]
                if t in parent_edge and h not in parent_edge:
                    parent_edge[h] = (idx, +1)   # tree edge points t -> h
                    order.append(h)
                    frontier = True
                elif h in parent_edge and t not in parent_edge:
                    parent_edge[t] = (idx, -1)
                    order.append(t)
                    frontier = True
        if len(parent_edge) != n_v:
            raise SurfaceError("vertex graph is disconnected")
        tree_edges = {v[0] for v in parent_edge.values() if v is not None}

        def path_to_root(v):
            """Chain of tree classes from vertex class v down to the root."""
            c = np.zeros(self.n_classes, dtype=np.int64)
            while parent_edge[v] is not None:
                idx, sign = parent_edge[v]
                # sign +1: edge runs parent -> v, so traverse backwards.
                c[idx] -= sign
                v = tails[idx] if sign == +1 else heads[idx]
            return c

        fundamental = []
        nontree = [i for i in range(self.n_classes) if i not in tree_edges]
        for idx in nontree:
            z = np.zeros(self.n_classes, dtype=np.int64)
            z[idx] = 1
            z += path_to_root(heads[idx])
            z -= path_to_root(tails[idx])
            fundamental.append(z)
        fundamental = np.array(fundamental, dtype=np.int64)

        # Quotient by face relations, expressed in non-tree coordinates.
        # Closed chains are determined by their non-tree coordinates.
        nontree_col = {c: j for j, c in enumerate(nontree)}
        rel_rows = []
        for p in range(len(s.polygons)):
            r = self.face_relation(p)
            rel_rows.append([r[c] for c in nontree])
        rel = np.array(rel_rows, dtype=np.int64)

        pivots = _hnf_pivots(rel)
        free_cols = [j for j in range(len(nontree)) if j not in pivots]
        g2 = 2 * s.genus()
        if len(free_cols) != g2:
            raise SurfaceError("absolute rank mismatch")
        self.cycles = np.array([fundamental[j] for j in free_cols], dtype=np.int64)
        self._check_cycles(tails, heads)
        self._intersection_matrix = None

    def _check_cycles(self, tails, heads):
        n_v = self.surface.n_vertex_classes
        for z in self.cycles:
            bnd = np.zeros(n_v, dtype=np.int64)
            for c in np.nonzero(z)[0]:
                bnd[heads[c]] += z[c]
                bnd[tails[c]] -= z[c]
            if np.any(bnd):
                raise SurfaceError("absolute cycle is not closed")

    # -- potentials and the wedge pairing -----------------------------------------

    def class_values(self, basis_values: np.ndarray) -> np.ndarray:
        """Values on every edge class from values on the basis classes."""
        return self.expr @ np.asarray(basis_values)

    def polygon_potentials(self, values_on_classes):
        """Per-polygon vertex potentials g with g[i+1]-g[i] = value on edge i."""
        s = self.surface
        pots = []
        for p, poly in enumerate(s.polygons):
            k = len(poly)
            g = [values_on_classes[0] * 0] * k
            acc = values_on_classes[0] * 0
            for i in range(k - 1):
                idx, sign = self.class_of[(p, i)]
                acc = acc + sign * values_on_classes[idx]
                g[i + 1] = acc
            pots.append(g)
        return pots

    def wedge(self, a_values, b_values) -> complex:
        """Intersection pairing of two cohomology classes (basis values in,
        scalar out).  Exact over Fractions if both inputs are Fractions."""
        av = self.class_values(np.asarray(a_values)) if not isinstance(a_values[0], Fraction) \
            else _expr_apply_exact(self.expr, a_values)
        bv = self.class_values(np.asarray(b_values)) if not isinstance(b_values[0], Fraction) \
            else _expr_apply_exact(self.expr, b_values)
        ga = self.polygon_potentials(av)
        gb = self.polygon_potentials(bv)
        total = av[0] * 0
        for p, poly in enumerate(self.surface.polygons):
            k = len(poly)
            g, h = ga[p], gb[p]
            for i in range(k):
                j = (i + 1) % k
                total = total + (h[j] - h[i]) * (g[i] + g[j])
        if isinstance(total, Fraction):
            return total / 2
        return total / 2.0

    # -- intersection matrix on absolute cycles ------------------------------------

    def intersection_matrix(self) -> np.ndarray:
        """Skew-symmetric unimodular matrix of cycle intersections."""
        if self._intersection_matrix is not None:
            return self._intersection_matrix
        m = self.rank
        g2 = len(self.cycles)
        ev = [[Fraction(int(self.reduce_chain(self.cycles[j])[k]))
               for j in range(g2)] for k in range(m)]
        gram = [[None] * m for _ in range(m)]
        unit = [Fraction(0)] * m
        for k in range(m):
            uk = list(unit)
            uk[k] = Fraction(1)
            for l in range(k, m):
                ul = list(unit)
                ul[l] = Fraction(1)
                val = self.wedge(uk, ul)
                gram[k][l] = val
                gram[l][k] = -val
        # Poincare duals x_j of the cycles: G x_j = Ev[:, j]; then
        # Omega = X^T G X = X^T Ev (sign fixed so the torus gives [[0,1],[-1,0]]).
        xs = []
        for j in range(g2):
            rhs = [ev[k][j] for k in range(m)]
            xs.append(_solve_exact(gram, rhs))
        omega = np.zeros((g2, g2), dtype=np.int64)
        for i in range(g2):
            for j in range(g2):
                val = sum(xs[i][k] * ev[k][j] for k in range(m))
                if val.denominator != 1:
                    raise SurfaceError("intersection matrix is not integral")
                omega[i, j] = -int(val)
        if np.any(omega + omega.T):
            raise SurfaceError("intersection matrix is not skew-symmetric")
        det = round(float(np.linalg.det(omega)))
        if det != 1:
            raise SurfaceError(f"intersection matrix not unimodular (det {det})")
        self._intersection_matrix = omega
        return omega

    # -- misc -------------------------------------------------------------------

    def fingerprint(self) -> str:
        if self._fingerprint is None:
            blob = self.surface.to_json() + repr(self.classes) + repr(self.basis_classes)
            self._fingerprint = hashlib.sha256(blob.encode()).hexdigest()[:16]
        return self._fingerprint

    def __repr__(self):
        return (f"HomologyBasis(rank {self.rank}, absolute rank "
                f"{len(self.cycles)}, fp {self.fingerprint()})")


def _expr_apply_exact(expr, values):
    out = []
    for row in expr:
        acc = Fraction(0)
        for c in np.nonzero(row)[0]:
            acc += int(row[c]) * values[c]
        out.append(acc)
    return out


def _hnf_pivots(mat: np.ndarray):
    """Pivot columns of an integer matrix under unimodular row reduction.

    Raises if a pivot is not +-1; the quotient lattice of every surface here
    is free with unit invariant factors, which this checks as a side effect.
    """
    a = [list(map(int, row)) for row in mat]
    rows, cols = len(a), (len(a[0]) if len(a) else 0)
    pivots = {}
    r = 0
    for c in range(cols):
        # gcd-reduce column c below row r
        while True:
            nz = [i for i in range(r, rows) if a[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[i0] = a[i0], a[r]
            done = True
            for i in range(r + 1, rows):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < rows and a[r][c] != 0:
            if abs(a[r][c]) != 1:
                raise SurfaceError("homology quotient has torsion pivot")
            pivots[c] = r
            r += 1
        if r == rows:
            break
    return pivots


def _solve_exact(gram, rhs):
    """Solve G x = rhs over Fractions; any solution of the consistent system."""
    m = len(rhs)
    a = [list(gram[i]) + [rhs[i]] for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(m):
        pr = None
        for i in range(r, m):
            if a[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, m):
        if a[i][m] != 0:
            raise SurfaceError("Poincare dual system inconsistent")
    x = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        x[c] = a[i][m]
    return x


@dataclass
class RelCohomClass:
    """A functional on relative homology: one value per basis generator."""

    basis: HomologyBasis
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.basis.rank,):
            raise BasisMismatchError("value vector does not match basis rank")

    def evaluate(self, chain: np.ndarray):
        """Value on a chain given over all edge classes."""
        return self.basis.reduce_chain(chain) @ self.values

    def on_basis_coords(self, coords: np.ndarray):
        return np.asarray(coords) @ self.values

    def edge_values(self) -> np.ndarray:
        return self.basis.class_values(self.values)

    def real(self) -> "RelCohomClass":
        return RelCohomClass(self.basis, self.values.real.copy())

    def imag(self) -> "RelCohomClass":
        return RelCohomClass(self.basis, self.values.imag.copy())

    def __add__(self, other):
        self._check(other)
        return RelCohomClass(self.basis, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return RelCohomClass(self.basis, self.values - other.values)

    def __mul__(self, c):
        return RelCohomClass(self.basis, self.values * c)

    __rmul__ = __mul__

    def _check(self, other):
        if other.basis is not self.basis and \
                other.basis.fingerprint() != self.basis.fingerprint():
            raise BasisMismatchError("classes live on different bases")

    def to_json_dict(self) -> dict:
        vals = np.asarray(self.values, dtype=complex)
        return {
            "basis_fingerprint": self.basis.fingerprint(),
            "values_re": vals.real.tolist(),
            "values_im": vals.imag.tolist(),
        }

    @staticmethod
    def from_json_dict(d: dict, basis: HomologyBasis) -> "RelCohomClass":
        if d["basis_fingerprint"] != basis.fingerprint():
            raise BasisMismatchError(
                "serialized class was taken on a different surface/basis")
        vals = np.array(d["values_re"]) + 1j * np.array(d["values_im"])
        if np.allclose(vals.imag, 0):
            vals = vals.real
        return RelCohomClass(basis, vals)


def build_bases(s: TranslationSurface) -> HomologyBasis:
    """Relative + absolute bases and the forgetful data, deterministically."""
    return HomologyBasis(s)


def holonomy(s: TranslationSurface, basis: HomologyBasis | None = None) -> RelCohomClass:
    """Period coordinates: each basis generator's total edge displacement,
    as a complex number (x + iy)."""
    basis = basis or build_bases(s)
    vals = np.zeros(basis.rank, dtype=complex)
    for j, cidx in enumerate(basis.basis_classes):
        v = s.edge_vector(basis.classes[cidx])
        vals[j] = complex(v[0], v[1])
    return RelCohomClass(basis, vals)


def intersection_pairing(a: RelCohomClass, b: RelCohomClass) -> float:
    """<p(a), p(b)> through the cup product on the closed surface."""
    a._check(b)
    return a.basis.wedge(a.values, b.values)


def forgetful_map(a: RelCohomClass) -> np.ndarray:
    """Image of a relative class in absolute cohomology, as its evaluations
    on the absolute cycle basis."""
    return np.array([a.evaluate(z) for z in a.basis.cycles])
