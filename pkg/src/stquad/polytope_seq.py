"""Degeneration sequences of 0/1-polytopes from the d-cube to the d-simplex.

Each sequence removes one cube vertex at a time.  Two families are built:

* ``sequence_a`` is recursive.  The removals of the (d-1)-sequence are
  lifted as ``(v, 1), (v, 0)`` pairs, then ``e_j + e_d`` are removed for
  ``j = 1 .. d-1`` in coordinate order.  After the first phase the polytope
  is a prism over the standard (d-1)-simplex.
* ``sequence_b`` removes all non-simplex vertices in decreasing binary order.

Bit strings list coordinates left to right, so ``"1001"`` is ``(1, 0, 0, 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .jacobi import ParameterError

MAX_DIM = 6


@dataclass(frozen=True, order=True)
class ZeroOneVertex:
    coords: tuple

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not 1 <= len(coords) <= 8 or any(c not in (0, 1) for c in coords):
            raise ParameterError(f"invalid 0/1 vertex {self.coords!r}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_bits(cls, bits: str) -> "ZeroOneVertex":
        return cls(tuple(int(b) for b in bits))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def bits(self) -> str:
        return "".join(map(str, self.coords))

    def lift(self, last: int) -> "ZeroOneVertex":
        return ZeroOneVertex(self.coords + (last,))

    def __str__(self):
        return self.bits()


@dataclass(frozen=True)
class ZeroOnePolytope:
    dim: int
    vertices: frozenset
    label: int = 0

    def __post_init__(self):
        if not self.vertices:
            raise ParameterError("a polytope needs at least one vertex")
        if any(v.dim != self.dim for v in self.vertices):
            raise ParameterError("vertex dimension does not match polytope")

    def __len__(self):
        return len(self.vertices)

    def sorted_vertices(self):
        return sorted(self.vertices, key=lambda v: v.bits(), reverse=True)

    def affine_rank(self) -> int:
        return affine_rank(self.vertices)

    def is_full_dimensional(self) -> bool:
        return self.affine_rank() == self.dim


@dataclass(frozen=True)
class DegenerationSequence:
    dim: int
    polytopes: tuple
    removed: tuple


def affine_rank(vertices) -> int:
    """Rank of the difference vectors, by exact Gaussian elimination."""
    verts = [v.coords for v in vertices]
    base = verts[0]
    rows = [[Fraction(a - b) for a, b in zip(v, base)] for v in verts[1:]]
    rank, ncols = 0, len(base)
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def cube(d: int) -> ZeroOnePolytope:
    return ZeroOnePolytope(d, frozenset(ZeroOneVertex(c) for c in product((0, 1), repeat=d)))


def standard_simplex(d: int) -> ZeroOnePolytope:
    verts = [tuple(0 for _ in range(d))]
    verts += [tuple(int(i == j) for i in range(d)) for j in range(d)]
    return ZeroOnePolytope(d, frozenset(ZeroOneVertex(v) for v in verts))


def _check_dim(d):
    if not isinstance(d, int) or not 1 <= d <= MAX_DIM:
        raise ParameterError(f"dimension must be an integer in [1, {MAX_DIM}], got {d!r}")


def _build(d, removed) -> DegenerationSequence:
    current = cube(d)
    polys = [current]
    for i, v in enumerate(removed, start=1):
        current = ZeroOnePolytope(d, current.vertices - {v}, i)
        polys.append(current)
    return DegenerationSequence(d, tuple(polys), tuple(removed))


def _removed_a(d):
    if d == 1:
        return []
    lifted = []
    for v in _removed_a(d - 1):
        lifted += [v.lift(1), v.lift(0)]
    tail = [ZeroOneVertex(tuple(int(i == j or i == d - 1) for i in range(d)))
            for j in range(d - 1)]
    return lifted + tail


def sequence_a(d: int) -> DegenerationSequence:
    """Recursive sequence through the prism over the (d-1)-simplex."""
    _check_dim(d)
    return _build(d, _removed_a(d))


def sequence_b(d: int) -> DegenerationSequence:
    """Sequence removing non-simplex vertices in decreasing binary order."""
    _check_dim(d)
    keep = standard_simplex(d).vertices
    removed = sorted((v for v in cube(d).vertices if v not in keep),
                     key=lambda v: v.bits(), reverse=True)
    return _build(d, removed)


def is_prism_over(p: ZeroOnePolytope, q: ZeroOnePolytope) -> bool:
    """True iff p's vertices are exactly {(v,0)} and {(v,1)} for v in q."""
    if p.dim != q.dim + 1:
        raise ParameterError(f"dimensions {p.dim} and {q.dim} do not differ by one")
    expected = {v.lift(0) for v in q.vertices} | {v.lift(1) for v in q.vertices}
    return set(p.vertices) == expected


def vertex_count_profile(seq: DegenerationSequence) -> list:
    return [len(p) for p in seq.polytopes]


def format_sequence(seq: DegenerationSequence, show_polytopes: bool = False) -> str:
    """Plain text: removed vertices one per line, then optionally one block per polytope."""
    blocks = ["\n".join(v.bits() for v in seq.removed)]
    if show_polytopes:
        for p in seq.polytopes:
            blocks.append("\n".join(v.bits() for v in p.sorted_vertices()))
    return "\n\n".join(blocks) + "\n"
