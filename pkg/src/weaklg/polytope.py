"""Exact lattice and rational polytopes with the toric invariants used here.

Hulls are found by exhaustive supporting-hyperplane enumeration over point
subsets, which is entirely adequate for the small inputs this package sees
(tens of points, dimension at most 3 for the face-structure work).  Facets
are stored as (primitive integer normal a, offset c) with the polytope on the
side <a, x> <= c; when the origin is strictly interior every offset is
positive and the polar dual has vertices -a/c.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .laurent import format_rational, normalize_rational


class NotFullDimensional(ValueError):
    """The given points span a proper affine subspace."""


def _dot(a, x):
    return sum(ai * xi for ai, xi in zip(a, x))


class RationalPolytope:
    """Full-dimensional polytope with rational vertices.

    Instances are produced by convex_hull and dual rather than built by hand;
    the constructor trusts its inputs apart from basic shape checks.
    """

    __slots__ = ("_n", "_vertices", "_facets")

    def __init__(self, n, vertices, facets):
        self._n = n
        self._vertices = tuple(
            sorted(tuple(normalize_rational(x) for x in v) for v in vertices)
        )
        self._facets = tuple(
            sorted((tuple(a), normalize_rational(c)) for a, c in facets)
        )
        if not self._vertices or not self._facets:
            raise ValueError("a polytope needs vertices and facets")
        for v in self._vertices:
            if len(v) != n:
                raise ValueError(f"vertex {v} does not have dimension {n}")
        for a, _ in self._facets:
            if len(a) != n:
                raise ValueError(f"facet normal {a} does not have dimension {n}")

    @property
    def dimension(self):
        return self._n

    @property
    def vertices(self):
        return self._vertices

    @property
    def facets(self):
        return self._facets

    def is_integral(self):
        return all(isinstance(x, int) for v in self._vertices for x in v)

    def contains(self, point, strict=False):
        p = tuple(point)
        for a, c in self._facets:
            s = _dot(a, p)
            if s > c or (strict and s == c):
                return False
        return True

    def facet_vertices(self, facet):
        a, c = facet
        return tuple(v for v in self._vertices if _dot(a, v) == c)

    def __eq__(self, other):
        if not isinstance(other, RationalPolytope):
            return NotImplemented
        return (
            self._n == other._n
            and self._vertices == other._vertices
            and self._facets == other._facets
        )

    def __hash__(self):
        return hash((self._n, self._vertices, self._facets))

    def __repr__(self):
        return (
            f"{type(self).__name__}(n={self._n}, vertices={len(self._vertices)}, "
            f"facets={len(self._facets)})"
        )


class LatticePolytope(RationalPolytope):
    """Polytope whose vertices are integer lattice points."""

    def __init__(self, n, vertices, facets):
        super().__init__(n, vertices, facets)
        if not self.is_integral():
            raise ValueError("lattice polytope vertices must be integers")

    def to_text(self):
        return "\n".join(" ".join(str(x) for x in v) for v in self._vertices) + "\n"


def _hyperplane_normal(points):
    """Primitive integer normal of the hyperplane through n points, or None."""
    base = points[0]
    n = len(base)
    rows = [[x - b for x, b in zip(p, base)] for p in points[1:]]
    kernel = linalg.nullspace(rows, ncols=n)
    if len(kernel) != 1:
        return None
    vec = kernel[0]
    den = 1
    for x in vec:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return linalg.primitive([int(x * den) for x in vec])


def convex_hull(points):
    """Exact hull of integer points: vertices plus primitive facet data."""
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if not pts:
        raise ValueError("convex hull of an empty point set")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise ValueError("points have inconsistent dimensions")
    base = pts[0]
    directions = [[x - b for x, b in zip(p, base)] for p in pts[1:]]
    spanned = linalg.rank(directions) if directions else 0
    if spanned < n:
        raise NotFullDimensional(
            f"points span a {spanned}-dimensional affine subspace of R^{n}"
        )
    facets = {}
    for combo in itertools.combinations(pts, n):
        normal = _hyperplane_normal(combo)
        if normal is None:
            continue
        c = _dot(normal, combo[0])
        below = above = False
        for p in pts:
            s = _dot(normal, p)
            if s > c:
                above = True
            elif s < c:
                below = True
            if above and below:
                break
        if above and below:
            continue
        if above:
            normal, c = tuple(-x for x in normal), -c
        facets[(normal, c)] = None
    facet_list = sorted(facets)
    vertices = []
    for p in pts:
        incident = [a for a, c in facet_list if _dot(a, p) == c]
        if len(incident) >= n and linalg.rank(incident) == n:
            vertices.append(p)
    return LatticePolytope(n, vertices, facet_list)


def polytope_from_text(text):
    """Vertex-per-line format: space-separated integers, '#' comments."""
    from .laurent import ParseError

    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            pts.append(tuple(int(tok) for tok in line.split()))
        except ValueError:
            raise ParseError(f"bad vertex line {line!r}", lineno) from None
    if not pts:
        raise ParseError("no vertices in polytope input")
    return convex_hull(pts)


def newton_polytope(f):
    """Hull of the support of f; the support must span all of R^n."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no Newton polytope")
    return convex_hull(f.support())


def lattice_points(P, strict=False):
    """All lattice points of P (strictly interior ones when strict is set)."""
    ranges = []
    for i in range(P.dimension):
        coords = [v[i] for v in P.vertices]
        ranges.append(range(math.floor(min(coords)), math.ceil(max(coords)) + 1))
    return tuple(p for p in itertools.product(*ranges) if P.contains(p, strict=strict))


def interior_lattice_points(P):
    return lattice_points(P, strict=True)


def is_canonical(P):
    """True when the origin is the only interior lattice point."""
    return interior_lattice_points(P) == ((0,) * P.dimension,)


def _require_origin_interior(P):
    if not all(c > 0 for _, c in P.facets):
        raise ValueError("the origin is not strictly interior to the polytope")


def dual(P):
    """Polar polytope {m : <m, v> >= -1 for all v in P}.

    Its vertices are -a/c over the facets (a, c) of P and its facets come
    from the vertices of P, so no hull computation is needed and biduality
    returns the original vertex set exactly.
    """
    _require_origin_interior(P)
    n = P.dimension
    verts = []
    for a, c in P.facets:
        verts.append(tuple(normalize_rational(Fraction(-ai) / c) for ai in a))
    facets = []
    for v in P.vertices:
        den = 1
        for x in v:
            if isinstance(x, Fraction):
                den = den * x.denominator // math.gcd(den, x.denominator)
        scaled = [int(-x * den) for x in v]
        g = math.gcd(*(abs(x) for x in scaled))
        facets.append(
            (tuple(x // g for x in scaled), normalize_rational(Fraction(den, g)))
        )
    return RationalPolytope(n, verts, facets)


def as_lattice(Q):
    """Rebuild a polytope with integral vertices as a LatticePolytope."""
    if not Q.is_integral():
        raise ValueError("polytope has non-integral vertices")
    return convex_hull(Q.vertices)


def is_reflexive(P):
    """True when every vertex of the polar dual is a lattice point."""
    _require_origin_interior(P)
    for a, c in P.facets:
        if any(not isinstance(normalize_rational(Fraction(-ai) / c), int) for ai in a):
            return False
    return True


def _facet_edges(P, facet, table):
    """Vertex pairs of `facet` shared with another facet: the polygon edges."""
    mine = set(table[facet])
    edges = set()
    for other in P.facets:
        if other == facet:
            continue
        shared = mine.intersection(table[other])
        if len(shared) == 2:
            edges.add(tuple(sorted(shared)))
    return sorted(edges)


def _volume(P, apex_position):
    n = P.dimension
    if n > 3:
        raise NotImplementedError("volume is implemented for dimension <= 3")
    table = {facet: P.facet_vertices(facet) for facet in P.facets}
    z = P.vertices[0]
    total = Fraction(0)
    for facet in P.facets:
        verts = table[facet]
        if n == 1:
            simplices = [verts]
        elif n == 2:
            simplices = [verts]
        else:
            apex = verts[apex_position]
            simplices = [
                (apex, u, v)
                for u, v in _facet_edges(P, facet, table)
                if apex != u and apex != v
            ]
        for simplex in simplices:
            rows = [[x - y for x, y in zip(w, z)] for w in simplex]
            d = linalg.det(rows)
            total += abs(Fraction(d))
    return total / math.factorial(n)


def volume(P):
    """Exact Euclidean volume, by coning facet triangulations over a vertex."""
    return normalize_rational(_volume(P, 0))


def anticanonical_degree(P):
    """n! times the Euclidean volume of the polar dual.

    Normalized so the simplex conv{e1, e2, e3, -(1,1,1)} gets 64, matching
    the cube (-K)^3 of projective 3-space.
    """
    _require_origin_interior(P)
    return normalize_rational(math.factorial(P.dimension) * _volume(dual(P), 0))


def anticanonical_sections(P):
    """Number of lattice points of the polar dual (boundary included)."""
    _require_origin_interior(P)
    return len(lattice_points(dual(P)))


def picard_rank(P):
    """Rank of the divisor class group of the face fan of P.

    Builds one unknown linear functional per facet cone and constrains every
    pair of cones to agree at each vertex they share, which forces agreement
    on whole shared faces.  The space of such piecewise-linear functions has
    dimension (number of global linear functions) + (rank of the class
    group), so the answer is the solution-space dimension minus n.
    """
    n = P.dimension
    if n > 3:
        raise NotImplementedError("picard_rank is implemented for dimension <= 3")
    _require_origin_interior(P)
    if not P.is_integral():
        raise ValueError("picard_rank expects a lattice polytope")
    facets = P.facets
    table = [P.facet_vertices(facet) for facet in facets]
    cols = n * len(facets)
    rows = []
    for i in range(len(facets)):
        mine = set(table[i])
        for j in range(i + 1, len(facets)):
            for w in sorted(mine.intersection(table[j])):
                row = [0] * cols
                for k in range(n):
                    row[n * i + k] = w[k]
                    row[n * j + k] = -w[k]
                rows.append(row)
    solution_dim = cols - (linalg.rank(rows) if rows else 0)
    return solution_dim - n


@dataclass(frozen=True)
class InvariantReport:
    """Bundle of the screening invariants for one polytope.

    `mismatches` is None when no expected record was supplied, otherwise a
    tuple of (field, expected, actual) triples, empty on full agreement.
    `dual_fan_picard_rank` is filled for reflexive input because the fan
    could equally be built over the dual polytope, and the two readings can
    differ.
    """

    canonical: bool
    reflexive: bool
    degree: object
    sections: int
    picard_rank: int
    dual_fan_picard_rank: int | None
    mismatches: tuple | None
    notes: tuple

    @property
    def matches_expected(self):
        return not self.mismatches

    def to_document(self):
        lines = [
            f"canonical: {'true' if self.canonical else 'false'}",
            f"reflexive: {'true' if self.reflexive else 'false'}",
            f"degree: {format_rational(self.degree)}",
            f"sections: {self.sections}",
            f"picard-rank: {self.picard_rank}",
        ]
        if self.dual_fan_picard_rank is not None:
            lines.append(f"picard-rank-dual-fan: {self.dual_fan_picard_rank}")
        if self.mismatches is not None:
            for field, want, have in self.mismatches:
                lines.append(
                    f"mismatch.{field}: expected {format_rational(want)},"
                    f" computed {format_rational(have)}"
                )
            lines.append(f"matches-expected: {'true' if not self.mismatches else 'false'}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"

    def to_table(self):
        rows = [
            ("canonical", "yes" if self.canonical else "no"),
            ("reflexive", "yes" if self.reflexive else "no"),
            ("degree", format_rational(self.degree)),
            ("sections", str(self.sections)),
            ("picard rank", str(self.picard_rank)),
        ]
        if self.dual_fan_picard_rank is not None:
            rows.append(("picard rank (dual fan)", str(self.dual_fan_picard_rank)))
        width = max(len(name) for name, _ in rows)
        out = [f"{name:<{width}}  {value}" for name, value in rows]
        for field, want, have in self.mismatches or ():
            out.append(f"!! {field}: expected {format_rational(want)}, computed {format_rational(have)}")
        return "\n".join(out) + "\n"


def invariant_report(P, expected=None):
    """Screening report: canonicity, reflexivity, degree, sections, rank.

    `expected` may be any object with degree / h0 / picard_rank attributes
    (a catalog record works); matching is exact and every disagreement is
    listed rather than raised.
    """
    _require_origin_interior(P)
    canonical = is_canonical(P)
    reflexive = is_reflexive(P)
    degree = anticanonical_degree(P)
    sections = anticanonical_sections(P)
    rank_value = picard_rank(P)
    dual_rank = None
    notes = []
    if reflexive:
        dual_rank = picard_rank(as_lattice(dual(P)))
        if dual_rank != rank_value:
            notes.append(
                "face fans over the polytope and over its dual give different"
                f" picard ranks ({rank_value} vs {dual_rank}); both are reported"
            )
    mismatches = None
    if expected is not None:
        comparisons = (
            ("degree", getattr(expected, "degree", None), degree),
            ("sections", getattr(expected, "h0", None), sections),
            ("picard-rank", getattr(expected, "picard_rank", None), rank_value),
        )
        mismatches = tuple(
            (field, want, have)
            for field, want, have in comparisons
            if want is not None and want != have
        )
    return InvariantReport(
        canonical=canonical,
        reflexive=reflexive,
        degree=degree,
        sections=sections,
        picard_rank=rank_value,
        dual_fan_picard_rank=dual_rank,
        mismatches=mismatches,
        notes=tuple(notes),
    )
