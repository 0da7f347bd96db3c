"""Orbital decompositions: multisets of orbit families with a given point total."""
from __future__ import annotations

from dataclasses import dataclass

from .elements import ElementKind
from .jacobi import ParameterError
from .symmetry import orbit_families

MAX_POINTS = 2000


@dataclass(frozen=True)
class Decomposition:
    kind: ElementKind
    counts: tuple  # ((family_id, multiplicity), ...) sorted by family id

    @property
    def count_map(self) -> dict:
        return dict(self.counts)

    @property
    def total_points(self) -> int:
        fams = {f.family_id: f for f in orbit_families(self.kind)}
        return sum(fams[k].cardinality * m for k, m in self.counts)

    @property
    def n_orbits(self) -> int:
        return sum(m for _, m in self.counts)

    @property
    def n_abscissa_params(self) -> int:
        fams = {f.family_id: f for f in orbit_families(self.kind)}
        return sum(fams[k].n_params * m for k, m in self.counts)

    @property
    def n_free_params(self) -> int:
        """Abscissa parameters plus one weight per orbit."""
        return self.n_abscissa_params + self.n_orbits

    def family_sequence(self) -> list:
        """Family ids with repetition, in ascending order (one entry per orbit)."""
        return [k for k, m in self.counts for _ in range(m)]

    @property
    def signature(self) -> str:
        return decomposition_signature(self)

    def __str__(self):
        return self.signature


def decomposition_signature(d: Decomposition) -> str:
    """Canonical text form such as ``"S1^1 S3^1 S4^1 S5^1"``."""
    if not d.counts:
        raise ParameterError("empty decomposition has no signature")
    return " ".join(f"S{k}^{m}" for k, m in d.counts)


def parse_signature(kind, text: str) -> Decomposition:
    counts = {}
    for tok in text.split():
        try:
            fam, mult = tok.lstrip("Ss").split("^")
            counts[int(fam)] = counts.get(int(fam), 0) + int(mult)
        except ValueError:
            raise ParameterError(f"bad signature token {tok!r}") from None
    kind = ElementKind.parse(kind)
    valid = {f.family_id for f in orbit_families(kind)}
    if not counts or set(counts) - valid or min(counts.values()) < 1:
        raise ParameterError(f"invalid signature {text!r} for {kind}")
    return Decomposition(kind, tuple(sorted(counts.items())))


def iter_decompositions(kind, n_points: int, max_s1: int | None = 1):
    """Yield decompositions in no particular order (streaming)."""
    kind = ElementKind.parse(kind)
    if not 1 <= n_points <= MAX_POINTS:
        raise ParameterError(f"n_points must be in [1, {MAX_POINTS}], got {n_points}")
    fams = orbit_families(kind)
    cards = [f.cardinality for f in fams]
    ids = [f.family_id for f in fams]
    caps = [max_s1 if (c == 1 and max_s1 is not None) else None for c in cards]

    def rec(pos, remaining, acc):
        if remaining == 0:
            yield Decomposition(kind, tuple(acc))
            return
        if pos == len(cards):
            return
        top = remaining // cards[pos]
        if caps[pos] is not None:
            top = min(top, caps[pos])
        for m in range(top, -1, -1):
            if m:
                acc.append((ids[pos], m))
            yield from rec(pos + 1, remaining - m * cards[pos], acc)
            if m:
                acc.pop()

    yield from rec(0, n_points, [])


def enumerate_decompositions(kind, n_points: int, max_s1: int | None = 1) -> list:
    """All decompositions summing to ``n_points``, by free parameters then signature.

    ``max_s1`` caps the multiplicity of the single-point centroid family;
    ``None`` removes the cap.
    """
    out = list(iter_decompositions(kind, n_points, max_s1))
    out.sort(key=lambda d: (d.n_free_params, d.signature))
    return out


def count_decompositions(kind, n_points: int, max_s1: int | None = 1) -> int:
    """Number of decompositions, by coin-change dynamic programming."""
    kind = ElementKind.parse(kind)
    ways = [1] + [0] * n_points
    for f in orbit_families(kind):
        c = f.cardinality
        if c == 1 and max_s1 is not None:
            ways = [sum(ways[n - m] for m in range(min(max_s1, n) + 1)) for n in range(n_points + 1)]
            continue
        for n in range(c, n_points + 1):
            ways[n] += ways[n - c]
    return ways[n_points]
