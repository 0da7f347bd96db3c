"""Quadrature rule data model, text file format and bundled catalog.

Orbit file format::

    # optional comment lines
    <element> <strength> <n_points> <n_orbits>
    <family_id> <param_1> ... <param_k> <weight>
    ...

Expanded file format (asymmetric rules such as Duffy products)::

    <element> <strength> <n_points> expanded
    <x1> <x2> <x3> <x4> <w>
    ...

Numbers are written with 34 significant digits.  Rules live in the
reference frame.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import mpmath
import numpy as np

from .elements import ElementKind, contains, volume
from .jacobi import EXTENDED_DPS, ParameterError
from .symmetry import family

DIGITS = 34
RULES_ENV = "STQUAD_RULES_DIR"
BUNDLED_DIR = Path(__file__).with_name("rules")

#: Published point counts N_p by strength (tesseract, pentatope, tet-prism).
TABLE1_POINTS = {
    ElementKind.TESSERACT: {2: 16, 3: 16, 4: 24, 5: 24, 6: 57, 7: 57, 8: 160,
                            9: 160, 10: 272, 11: 272, 12: 512, 13: 512,
                            14: 728, 15: 728, 16: 1384},
    ElementKind.PENTATOPE: {2: 5, 3: 15, 4: 20, 5: 30, 6: 56, 7: 70, 8: 105,
                            9: 151, 10: 210, 11: 281, 12: 445, 13: 555,
                            14: 725, 15: 905, 16: 1055},
    ElementKind.TETPRISM: {2: 6, 3: 12, 4: 20, 5: 27, 6: 61, 7: 72, 8: 114,
                           9: 159, 10: 259, 11: 322, 12: 468, 13: 608,
                           14: 921},
}


class RuleFormatError(ValueError):
    """Malformed rule file."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class RuleValidationError(ValueError):
    """A rule violates positivity, containment or volume invariants."""


def _mp(value):
    if isinstance(value, mpmath.mpf):
        return value
    if isinstance(value, str):
        return mpmath.mpf(value)
    return mpmath.mpf(float(value))


def format_number(value, digits=DIGITS) -> str:
    return mpmath.nstr(_mp(value), digits, strip_zeros=False,
                       min_fixed=-6, max_fixed=3)


@dataclass
class Orbit:
    family_id: int
    params: tuple
    weight: object

    def __post_init__(self):
        self.params = tuple(_mp(p) for p in self.params)
        self.weight = _mp(self.weight)


@dataclass
class QuadratureRule:
    """A quadrature rule on a reference element.

    Symmetric rules are stored as orbits; asymmetric ones (``orbits`` empty)
    carry explicit points and weights.
    """

    kind: ElementKind
    strength: int
    orbits: list = field(default_factory=list)
    provenance: str = "generated"
    explicit_points: np.ndarray | None = field(default=None, repr=False)
    explicit_weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.kind = ElementKind.parse(self.kind)
        self.strength = int(self.strength)
        self._cache = {}

    @classmethod
    def from_points(cls, kind, strength, points, weights, provenance="duffy"):
        return cls(kind, strength, [], provenance,
                   np.asarray(points), np.asarray(weights))

    @property
    def is_symmetric(self) -> bool:
        return self.explicit_points is None

    @property
    def n_points(self) -> int:
        if not self.is_symmetric:
            return len(self.explicit_weights)
        return sum(family(self.kind, o.family_id).cardinality for o in self.orbits)

    def expanded(self, extended: bool = False):
        """Return ``(points, weights)``; object arrays of mpf if ``extended``."""
        key = bool(extended)
        if key in self._cache:
            return self._cache[key]
        if not self.is_symmetric:
            pts, wts = self.explicit_points, self.explicit_weights
            if extended:
                pts = np.vectorize(_mp, otypes=[object])(pts)
                wts = np.vectorize(_mp, otypes=[object])(wts)
            else:
                pts = np.asarray(pts, dtype=float)
                wts = np.asarray(wts, dtype=float)
        else:
            blocks, wblocks = [], []
            for o in self.orbits:
                fam = family(self.kind, o.family_id)
                if extended:
                    p = fam.points(np.array(o.params, dtype=object))
                    w = np.full(fam.cardinality, o.weight, dtype=object)
                else:
                    p = fam.points(np.array([float(v) for v in o.params]))
                    w = np.full(fam.cardinality, float(o.weight))
                blocks.append(p)
                wblocks.append(w)
            pts, wts = np.concatenate(blocks), np.concatenate(wblocks)
        self._cache[key] = (pts, wts)
        return pts, wts

    @property
    def points(self):
        return self.expanded()[0]

    @property
    def weights(self):
        return self.expanded()[1]

    def integrate(self, func, extended=False):
        """Apply the rule to ``func``, which maps an (n, 4) array to n values."""
        pts, wts = self.expanded(extended)
        vals = func(pts)
        return (wts * vals).sum()

    def validate(self, tol=1e-12):
        """Raise :class:`RuleValidationError` if an invariant fails."""
        pts, wts = self.expanded()
        if np.any(wts <= 0):
            raise RuleValidationError("rule has non-positive weights")
        if not np.all(contains(self.kind, pts, tol)):
            raise RuleValidationError("rule has points outside the element")
        vol = volume(self.kind)
        if abs(wts.sum() - vol) > tol * max(1.0, vol):
            raise RuleValidationError(
                f"weights sum to {wts.sum():.16g}, expected {vol:.16g}")
        for o in self.orbits:
            fam = family(self.kind, o.family_id)
            if len(o.params) != fam.n_params:
                raise RuleValidationError(f"{fam.name} needs {fam.n_params} parameters")
            if not fam.admissible([float(v) for v in o.params], tol=tol):
                raise RuleValidationError(f"{fam.name} parameters out of range")
        return self

    def signature(self) -> str:
        counts = {}
        for o in self.orbits:
            counts[o.family_id] = counts.get(o.family_id, 0) + 1
        return " ".join(f"S{k}^{v}" for k, v in sorted(counts.items()))


def write_rule(rule: QuadratureRule, destination, expanded: bool = False):
    """Write ``rule`` to a path or text stream."""
    lines = [f"# provenance: {rule.provenance}"]
    if rule.is_symmetric and not expanded:
        lines.append(f"{rule.kind} {rule.strength} {rule.n_points} {len(rule.orbits)}")
        for o in rule.orbits:
            nums = [format_number(p) for p in o.params] + [format_number(o.weight)]
            lines.append(" ".join([str(o.family_id)] + nums))
    else:
        pts, wts = rule.expanded(extended=True)
        lines.append(f"{rule.kind} {rule.strength} {len(wts)} expanded")
        for x, w in zip(pts, wts):
            lines.append(" ".join(format_number(v) for v in list(x) + [w]))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).parent.mkdir(parents=True, exist_ok=True)
        Path(destination).write_text(text)


def parse_rule(text: str, provenance="bundled", validate=True) -> QuadratureRule:
    rows = []
    for i, ln in enumerate(text.splitlines(), start=1):
        stripped = ln.strip()
        if stripped.startswith("#"):
            key, _, val = stripped[1:].partition(":")
            if key.strip() == "provenance" and val.strip():
                provenance = val.strip()
        elif stripped:
            rows.append((i, stripped.split()))
    if not rows:
        raise RuleFormatError("empty rule file")
    lineno, head = rows[0]
    if len(head) != 4:
        raise RuleFormatError("header must be 'element strength n_points n_orbits'", lineno)
    try:
        kind = ElementKind.parse(head[0])
        strength, npts = int(head[1]), int(head[2])
    except (ParameterError, ValueError) as exc:
        raise RuleFormatError(str(exc), lineno) from None
    body = rows[1:]
    with mpmath.workdps(EXTENDED_DPS):
        if head[3] == "expanded":
            if len(body) != npts:
                raise RuleFormatError(f"expected {npts} point rows, found {len(body)}", lineno)
            pts, wts = [], []
            for i, toks in body:
                if len(toks) != 5:
                    raise RuleFormatError("expected 'x1 x2 x3 x4 w'", i)
                try:
                    vals = [mpmath.mpf(t) for t in toks]
                except ValueError:
                    raise RuleFormatError("bad number", i) from None
                pts.append(vals[:4])
                wts.append(vals[4])
            rule = QuadratureRule.from_points(kind, strength, np.array(pts, dtype=object),
                                              np.array(wts, dtype=object), provenance)
        else:
            try:
                norb = int(head[3])
            except ValueError:
                raise RuleFormatError("n_orbits must be an integer", lineno) from None
            if len(body) != norb:
                raise RuleFormatError(f"expected {norb} orbit rows, found {len(body)}", lineno)
            orbits = []
            for i, toks in body:
                try:
                    fid = int(toks[0])
                    fam = family(kind, fid)
                    vals = [mpmath.mpf(t) for t in toks[1:]]
                except (ValueError, ParameterError, IndexError) as exc:
                    raise RuleFormatError(f"bad orbit row ({exc})", i) from None
                if len(vals) != fam.n_params + 1:
                    raise RuleFormatError(
                        f"S{fid} needs {fam.n_params} parameters and a weight", i)
                orbits.append(Orbit(fid, vals[:-1], vals[-1]))
            rule = QuadratureRule(kind, strength, orbits, provenance)
            if rule.n_points != npts:
                raise RuleFormatError(
                    f"orbits expand to {rule.n_points} points, header says {npts}", lineno)
    if validate:
        rule.validate()
    return rule


def read_rule(source, provenance="bundled", validate=True) -> QuadratureRule:
    """Read a rule from a path or text stream."""
    text = source.read() if hasattr(source, "read") else Path(source).read_text()
    return parse_rule(text, provenance, validate)


def rules_dir() -> Path:
    env = os.environ.get(RULES_ENV)
    return Path(env) if env else BUNDLED_DIR


def rule_path(kind, strength, n_points, root=None) -> Path:
    root = Path(root) if root else rules_dir()
    return root / str(ElementKind.parse(kind)) / f"{strength}-{n_points}.txt"


def resolve_rule_path(name) -> Path:
    """Find a rule file given as a path, or relative to the rules directory."""
    p = Path(name)
    if p.exists():
        return p
    for root in (rules_dir(), BUNDLED_DIR):
        parts = p.parts[1:] if p.parts and p.parts[0] == "rules" else p.parts
        cand = root.joinpath(*parts) if parts else root
        if cand.exists():
            return cand
    raise FileNotFoundError(name)


@lru_cache(maxsize=None)
def _load_catalog(root: str):
    catalog = {}
    for path in sorted(Path(root).glob("*/*.txt")):
        rule = read_rule(path)
        key = (rule.kind, rule.strength)
        if key not in catalog or rule.n_points < catalog[key].n_points:
            catalog[key] = rule
    return catalog


def bundled_rules(root=None) -> dict:
    """All shipped rules keyed by (kind, strength)."""
    return dict(_load_catalog(str(Path(root) if root else rules_dir())))


def get_rule(kind, strength, root=None) -> QuadratureRule:
    key = (ElementKind.parse(kind), int(strength))
    cat = bundled_rules(root)
    if key not in cat:
        raise KeyError(f"no bundled rule for {key[0]} strength {key[1]}")
    return cat[key]


def catalog_table(root=None):
    """Rows of (element, strength, bundled N_p, published N_p)."""
    cat = bundled_rules(root)
    rows = []
    for kind in ElementKind:
        for strength, npub in TABLE1_POINTS[kind].items():
            rule = cat.get((kind, strength))
            rows.append((kind, strength, rule.n_points if rule else None, npub))
    return rows
