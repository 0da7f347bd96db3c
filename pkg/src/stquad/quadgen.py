"""Symmetric quadrature rule generation by separable nonlinear least squares.

A rule of strength P must integrate every polynomial of total degree at most P.
For a symmetric rule it suffices to match the moments of a basis of the
group-invariant part of that space.  We pick orthonormal basis functions
whose group averages are linearly independent (checked numerically at random
points) and match

    sum_o w_o * sum_{x in orbit o} psi(x)  =  integral of psi,

which is sqrt(volume) for the constant function and zero otherwise.  The
weights enter linearly, so for fixed orbit parameters they are eliminated by
a minimum-norm linear least-squares solve.  A Levenberg-Marquardt iteration
then runs over the orbit parameters only.  Parameters are clamped into their
admissible region at every step, and a penalty entry collects negative
weight mass.
"""
from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .basis import total_degree_indices, vandermonde
from .decomp import Decomposition, enumerate_decompositions, parse_signature
from .elements import (ElementKind, contains, eval_monomials, monomial_exponents,
                       monomial_integral, sample_points, volume, volume_exact)
from .jacobi import ParameterError
from .rules import Orbit, QuadratureRule
from .symmetry import family, group_order, orbit_families, transform_points

log = logging.getLogger(__name__)

DOUBLE_TOL = 1e-14
EXTENDED_TOL = 1e-30
_FD_STEP = 1e-7
_RANK_TOL = 1e-8


@dataclass(frozen=True)
class MomentSystem:
    """Symmetry-reduced moment equations for one element and strength."""

    kind: ElementKind
    strength: int
    basis_indices: tuple
    rhs: np.ndarray = field(repr=False)

    @property
    def n_equations(self) -> int:
        return len(self.basis_indices)

    def rhs_extended(self):
        out = np.array([mpmath.mpf(0)] * self.n_equations, dtype=object)
        out[0] = mpmath.sqrt(mpmath.mpf(volume_exact(self.kind).numerator)
                             / volume_exact(self.kind).denominator)
        return out


def _independent_columns(mat, tol=_RANK_TOL):
    """Greedy column selection by Gram-Schmidt, in column order."""
    scale = max(np.linalg.norm(mat, axis=0).max(), 1e-300)
    basis, keep = [], []
    for j in range(mat.shape[1]):
        v = mat[:, j].copy()
        norm0 = np.linalg.norm(v)
        if norm0 <= tol * scale:
            continue
        for _ in range(2):
            for q in basis:
                v -= (q @ v) * q
        nv = np.linalg.norm(v)
        if nv > tol * norm0:
            basis.append(v / nv)
            keep.append(j)
    return keep


@lru_cache(maxsize=None)
def moment_system(kind, strength: int) -> MomentSystem:
    """Build the reduced system for rules of total-degree strength ``strength``."""
    kind = ElementKind.parse(kind)
    if not 0 <= strength <= 20:
        raise ParameterError(f"strength must be in [0, 20], got {strength}")
    indices = total_degree_indices(strength)
    rng = np.random.default_rng(20240607 + strength)
    n_pts = min(len(indices), 2 * len(indices) // group_order(kind) + 80)
    while True:
        pts = sample_points(kind, n_pts, rng)
        images = transform_points(kind, pts)
        sym = np.zeros((n_pts, len(indices)))
        for img in images:
            sym += vandermonde(kind, indices, img, check=False)
        sym /= len(images)
        keep = _independent_columns(sym)
        if len(keep) < n_pts or n_pts >= len(indices):
            break
        n_pts = min(len(indices), 2 * n_pts)
    reps = tuple(indices[j] for j in keep)
    rhs = np.zeros(len(reps))
    rhs[0] = np.sqrt(volume(kind))
    return MomentSystem(kind, strength, reps, rhs)


@dataclass(frozen=True)
class SolveConfig:
    max_iterations: int = 200
    residual_tol: float | None = None
    n_starts: int = 16
    rng_seed: int = 0
    penalty_on: bool = True
    precision_mode: str = "double"
    jobs: int = 1
    max_s1: int | None = 1
    max_decompositions: int | None = None
    skip_underdetermined: bool = False
    signatures: tuple | None = None

    def __post_init__(self):
        if self.precision_mode not in ("double", "extended"):
            raise ParameterError("precision_mode must be 'double' or 'extended'")
        if self.n_starts < 1:
            raise ParameterError("n_starts must be at least 1")
        if self.residual_tol is not None and self.residual_tol <= 0:
            raise ParameterError("residual_tol must be positive")

    @property
    def tol(self) -> float:
        if self.residual_tol is not None:
            return self.residual_tol
        return EXTENDED_TOL if self.precision_mode == "extended" else DOUBLE_TOL


@dataclass
class SearchResult:
    decomposition: Decomposition
    rule: QuadratureRule | None
    residual: float
    iterations_used: int
    starts_used: int
    params: np.ndarray | None = field(default=None, repr=False)
    weights: np.ndarray | None = field(default=None, repr=False)

    @property
    def success(self) -> bool:
        return self.rule is not None


class _Problem:
    """A moment system paired with one decomposition."""

    def __init__(self, system: MomentSystem, decomposition: Decomposition):
        if decomposition.kind is not system.kind:
            raise ParameterError("decomposition and moment system disagree on element")
        self.system = system
        self.kind = system.kind
        self.dec = decomposition
        self.fams = [family(self.kind, fid) for fid in decomposition.family_sequence()]
        self.sizes = [f.n_params for f in self.fams]
        self.starts = np.concatenate([[0], np.cumsum(self.sizes)]).astype(int)
        self.n_params = int(self.starts[-1])
        self.cards = np.array([f.cardinality for f in self.fams])
        self.seg = np.concatenate([[0], np.cumsum(self.cards)[:-1]]).astype(int)

    def split(self, x):
        return [x[self.starts[i]:self.starts[i + 1]] for i in range(len(self.fams))]

    def clamp(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_params,):
            raise ParameterError(f"expected {self.n_params} orbit parameters, got {x.shape}")
        out = [f.clamp(p) for f, p in zip(self.fams, self.split(x))]
        return np.concatenate(out) if out else np.zeros(0)

    def sample(self, rng):
        out = [f.sample(rng) for f in self.fams]
        return np.concatenate(out) if out else np.zeros(0)

    def points(self, x):
        return np.concatenate([f.points(p) for f, p in zip(self.fams, self.split(x))])

    def matrices(self, xs):
        """Orbit-sum matrices, shape (batch, n_equations, n_orbits)."""
        xs = np.atleast_2d(xs)
        pts = np.concatenate([self.points(x) for x in xs])
        V = vandermonde(self.kind, self.system.basis_indices, pts, check=False)
        V = V.reshape(len(xs), -1, V.shape[1])
        return np.add.reduceat(V, self.seg, axis=1).transpose(0, 2, 1)

    def matrix_extended(self, x):
        pts = np.concatenate([f.points(np.array(p, dtype=object))
                              for f, p in zip(self.fams, self.split(x))])
        V = vandermonde(self.kind, self.system.basis_indices, pts, check=False)
        out = np.empty((V.shape[1], len(self.fams)), dtype=object)
        for o, (s, c) in enumerate(zip(self.seg, self.cards)):
            out[:, o] = V[s:s + c].sum(axis=0)
        return out

    def penalty(self, w):
        return float(np.sum(self.cards * np.minimum(w, 0.0)))

    def separable(self, xs, penalty_on=True):
        """Residual vectors with weights eliminated, one row per parameter vector."""
        rhs = self.system.rhs
        out = []
        for B in self.matrices(xs):
            w = np.linalg.lstsq(B, rhs, rcond=None)[0]
            r = B @ w - rhs
            out.append(np.append(r, self.penalty(w)) if penalty_on else r)
        return np.array(out)

    def full(self, zs, penalty_on=True):
        """Residual vectors over concatenated (params, weights)."""
        zs = np.atleast_2d(zs)
        xs, ws = zs[:, :self.n_params], zs[:, self.n_params:]
        out = []
        for B, w in zip(self.matrices(xs), ws):
            r = B @ w - self.system.rhs
            out.append(np.append(r, self.penalty(w)) if penalty_on else r)
        return np.array(out)

    def weights(self, x):
        B = self.matrices(x)[0]
        return np.linalg.lstsq(B, self.system.rhs, rcond=None)[0]


def _levenberg_marquardt(fun, x0, project, max_iter, tol):
    """Minimise ||fun(x)|| with projection onto the admissible box.

    ``fun`` maps a batch of parameter vectors to a batch of residuals.
    Returns ``(x, residual_norm, iterations)``.
    """
    x = project(x0)
    r = fun(x[None])[0]
    cost = np.linalg.norm(r)
    n = x.size
    if n == 0:
        return x, cost, 0
    lam = 1e-3
    history = [cost]
    it = 0
    for it in range(1, max_iter + 1):
        if cost <= tol:
            it -= 1
            break
        steps = _FD_STEP * np.maximum(1.0, np.abs(x))
        trial = np.array([project(x + steps[k] * np.eye(n)[k]) for k in range(n)])
        diff = trial[np.arange(n), np.arange(n)] - x
        flip = np.abs(diff) < 0.5 * steps
        for k in np.flatnonzero(flip):
            trial[k] = project(x - steps[k] * np.eye(n)[k])
        diff = trial[np.arange(n), np.arange(n)] - x
        diff = np.where(np.abs(diff) < 0.5 * steps, np.inf, diff)
        J = ((fun(trial) - r) / diff[:, None]).T
        JtJ = J.T @ J
        scale = np.sqrt(np.maximum(np.diag(JtJ), 1e-12))
        improved = False
        while lam < 1e12:
            A = np.vstack([J, np.sqrt(lam) * np.diag(scale)])
            b = np.concatenate([-r, np.zeros(n)])
            delta = np.linalg.lstsq(A, b, rcond=None)[0]
            x_new = project(x + delta)
            clipped = np.abs(x_new - x - delta) > 1e-12 * (1 + np.abs(x))
            if clipped.any() and not clipped.all():
                # active set: re-solve with the clipped variables held fixed
                free = ~clipped
                d2 = np.zeros(n)
                d2[free] = np.linalg.lstsq(A[:, free], b, rcond=None)[0]
                cands = np.array([x_new, project(x + d2)])
                rs = fun(cands)
                cs = np.linalg.norm(rs, axis=1)
                k = int(np.argmin(np.where(np.isfinite(cs), cs, np.inf)))
                x_new, r_new, c_new = cands[k], rs[k], cs[k]
            else:
                r_new = fun(x_new[None])[0]
                c_new = np.linalg.norm(r_new)
            if np.isfinite(c_new) and c_new < cost:
                x, r, cost = x_new, r_new, c_new
                lam = max(lam / 3.0, 1e-15)
                improved = True
                break
            lam *= 4.0
        history.append(cost)
        if not improved:
            break
        if len(history) > 20 and cost > (1 - 1e-3) * history[-21]:
            break
    return x, cost, it


def _task_seed(rng_seed, signature, start):
    digest = hashlib.blake2b(signature.encode(), digest_size=8).digest()
    return np.random.SeedSequence([int(rng_seed) & (2 ** 64 - 1),
                                   int.from_bytes(digest, "little"), int(start)])


def _distinct(points, tol=1e-8):
    rounded = np.round(np.asarray(points, dtype=float) / tol)
    return len(np.unique(rounded, axis=0)) == len(rounded)


def _refine_extended(problem: _Problem, x, w, max_iter=25, tol=EXTENDED_TOL):
    """Gauss-Newton polishing in extended precision, minimum-norm steps.

    Unknowns are all orbit parameters and weights.  Returns mpf arrays and
    the final residual norm.
    """
    rhs = problem.system.rhs_extended()
    n, m = problem.n_params, len(problem.fams)
    z = np.array([mpmath.mpf(float(v)) for v in np.concatenate([x, w])], dtype=object)

    def res(z):
        B = problem.matrix_extended(z[:n])
        return B.dot(z[n:]) - rhs, B

    def norm(r):
        return mpmath.sqrt(sum(v * v for v in r))

    r, B = res(z)
    best = norm(r)
    h = mpmath.mpf(10) ** (-(mpmath.mp.dps // 2))
    for _ in range(max_iter):
        if best <= tol:
            break
        J = np.empty((len(r), n + m), dtype=object)
        J[:, n:] = B
        for k in range(n):
            zp = z.copy()
            zp[k] += h
            J[:, k] = (res(zp)[0] - r) / h
        Jm, rm = mpmath.matrix(J.tolist()), mpmath.matrix(list(r))
        # Tikhonov-regularised normal equations give a minimum-norm step
        # whether the system is under- or overdetermined, even when rank deficient.
        eps = mpmath.mpf(10) ** (-mpmath.mp.dps)
        if Jm.rows >= Jm.cols:
            G = Jm.T * Jm
            step = mpmath.lu_solve(G + mpmath.eye(G.rows) * eps * _max_diag(G), -(Jm.T * rm))
        else:
            G = Jm * Jm.T
            step = Jm.T * mpmath.lu_solve(G + mpmath.eye(G.rows) * eps * _max_diag(G), -rm)
        z_new = z + np.array([step[i] for i in range(n + m)], dtype=object)
        for f, s in zip(problem.fams, problem.starts):
            p = z_new[s:s + f.n_params]
            if f.n_params and not f.admissible([float(v) for v in p], tol=0):
                clamped = f.clamp([float(v) for v in p])
                for j in range(f.n_params):
                    if float(p[j]) != clamped[j]:
                        p[j] = mpmath.mpf(clamped[j])
                z_new[s:s + f.n_params] = p
        r_new, B_new = res(z_new)
        c_new = norm(r_new)
        if not c_new < best:
            break
        z, r, B, best = z_new, r_new, B_new, c_new
    return z[:n], z[n:], best


def _max_diag(G):
    return max(max(abs(G[i, i]) for i in range(G.rows)), mpmath.mpf(1))


def _make_rule(problem, x, w, strength, provenance="generated"):
    orbits = []
    for f, p, wo in zip(problem.fams, problem.split(x), w):
        orbits.append(Orbit(f.family_id, tuple(p), wo))
    return QuadratureRule(problem.kind, strength, orbits, provenance)


def _admissible(problem, x, w, cost, tol):
    if not cost <= tol:
        return False
    if np.any(np.asarray([float(v) for v in w]) <= 1e-16):
        return False
    xf = np.array([float(v) for v in x])
    pts = problem.points(xf)
    return bool(np.all(contains(problem.kind, pts, 1e-12)) and _distinct(pts))


def _run_start(args):
    """One random start on one decomposition.  Pure given its arguments."""
    kind, strength, signature, start, config = args
    system = moment_system(kind, strength)
    problem = _Problem(system, parse_signature(kind, signature))
    rng = np.random.default_rng(_task_seed(config.rng_seed, signature, start))
    x0 = problem.sample(rng)

    def fun(xs):
        return problem.separable(xs, config.penalty_on)

    x, cost, iters = _levenberg_marquardt(fun, x0, problem.clamp,
                                          config.max_iterations, min(config.tol, DOUBLE_TOL))
    w = problem.weights(x)
    cost = float(np.linalg.norm(problem.separable(x[None], False)[0]))
    if config.precision_mode == "extended" and cost < 1e-6 and np.all(w > 0):
        xe, we, ce = _refine_extended(problem, x, w, tol=config.tol)
        return start, xe, we, float(ce), iters
    return start, x, w, cost, iters


def residual(kind, strength, decomposition, orbit_params, weights, penalty_on=True):
    """Moment residual vector of a symmetric rule (penalty entry appended)."""
    system = moment_system(kind, strength)
    if isinstance(decomposition, str):
        decomposition = parse_signature(kind, decomposition)
    problem = _Problem(system, decomposition)
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(problem.fams),):
        raise ParameterError(f"expected {len(problem.fams)} weights, got {w.shape}")
    x = problem.clamp(np.nan_to_num(np.asarray(orbit_params, dtype=float)))
    return problem.full(np.concatenate([x, w])[None], penalty_on)[0]


def solve_weights(kind, strength, decomposition, orbit_params):
    """Minimum-norm least-squares weights for fixed orbit parameters.

    Returns ``(weights, residual_norm)``.
    """
    system = moment_system(kind, strength)
    if isinstance(decomposition, str):
        decomposition = parse_signature(kind, decomposition)
    problem = _Problem(system, decomposition)
    x = problem.clamp(orbit_params)
    B = problem.matrices(x)[0]
    w = np.linalg.lstsq(B, system.rhs, rcond=None)[0]
    pts = problem.points(x)
    if not _distinct(pts):
        log.debug("coincident points in %s", decomposition.signature)
    return w, float(np.linalg.norm(B @ w - system.rhs))


def solve_full(kind, strength, decomposition, orbit_params, weights, config=SolveConfig()):
    """Diagnostic solve with weights as free unknowns (no elimination).

    Returns ``(params, weights, residual_norm, iterations)``.
    """
    system = moment_system(kind, strength)
    if isinstance(decomposition, str):
        decomposition = parse_signature(kind, decomposition)
    problem = _Problem(system, decomposition)
    n = problem.n_params

    def project(z):
        return np.concatenate([problem.clamp(z[:n]), z[n:]])

    z0 = np.concatenate([np.asarray(orbit_params, float), np.asarray(weights, float)])
    z, _, iters = _levenberg_marquardt(lambda zs: problem.full(zs, config.penalty_on),
                                       z0, project, config.max_iterations, config.tol)
    cost = float(np.linalg.norm(problem.full(z[None], False)[0]))
    return z[:n], z[n:], cost, iters


def solve_decomposition(kind, strength, decomposition, config=SolveConfig(), pool=None):
    """Run all starts of one decomposition; returns a :class:`SearchResult`."""
    kind = ElementKind.parse(kind)
    if isinstance(decomposition, str):
        decomposition = parse_signature(kind, decomposition)
    system = moment_system(kind, strength)
    problem = _Problem(system, decomposition)
    sig = decomposition.signature
    tasks = [(kind, strength, sig, s, config) for s in range(config.n_starts)]
    best, used, total_iters = None, 0, 0
    outputs = pool.map(_run_start, tasks) if pool is not None else map(_run_start, tasks)
    found = None
    for start, x, w, cost, iters in outputs:
        used += 1
        total_iters += iters
        if best is None or cost < best[3]:
            best = (start, x, w, cost, iters)
        if _admissible(problem, x, w, cost, config.tol):
            found = (start, x, w, cost, iters)
            if pool is None:
                break
    pick = found or best
    rule = _make_rule(problem, pick[1], pick[2], strength) if found else None
    log.info("decomposition %s residual=%.3e starts=%d %s", sig, pick[3], used,
             "ok" if found else "fail")
    return SearchResult(decomposition, rule, pick[3], pick[4], used, pick[1], pick[2])


def search(kind, strength: int, n_points: int, config: SolveConfig = SolveConfig()):
    """Try decompositions in free-parameter order until a rule is found.

    Returns one :class:`SearchResult` per attempted decomposition, sorted by
    residual.
    """
    kind = ElementKind.parse(kind)
    system = moment_system(kind, strength)
    if config.signatures:
        decs = [parse_signature(kind, s) for s in config.signatures]
        bad = [d.signature for d in decs if d.total_points != n_points]
        if bad:
            raise ParameterError(f"signatures {bad} do not sum to {n_points} points")
    else:
        decs = enumerate_decompositions(kind, n_points, config.max_s1)
    if config.skip_underdetermined:
        decs = [d for d in decs if d.n_free_params >= system.n_equations]
    if config.max_decompositions is not None:
        decs = decs[:config.max_decompositions]
    results = []
    pool = ProcessPoolExecutor(config.jobs) if config.jobs > 1 else None
    try:
        for dec in decs:
            res = solve_decomposition(kind, strength, dec, config, pool)
            results.append(res)
            if res.success:
                break
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    results.sort(key=lambda r: (not r.success, r.residual))
    return results


def best_rule(results):
    """The first admissible rule among search results, or ``None``."""
    return next((r.rule for r in results if r.rule is not None), None)


def _orbit_moves(fids, mass, cards, lateral=False):
    """Candidate moves, lightest orbits first.

    A move ``(k, added)`` removes orbit ``k`` and adds the families in
    ``added``.  Shrinking moves drop an orbit or swap it for one or two
    smaller ones; lateral moves swap it for the same number of points.
    """
    order = [int(k) for k in np.argsort(mass)]
    fams = sorted(cards, key=lambda g: -cards[g])
    if lateral:
        fits = lambda total, k: total == cards[fids[k]]
    else:
        fits = lambda total, k: total < cards[fids[k]]
    moves = []
    for k in order:
        if not lateral:
            moves.append((k, ()))
        moves.extend((k, (g,)) for g in fams if g != fids[k] and fits(cards[g], k))
    for k in order:
        moves.extend((k, (g, h)) for g in fams for h in fams
                     if g <= h and fits(cards[g] + cards[h], k))
    return moves


def reduce_rule(rule: QuadratureRule, n_points: int, config: SolveConfig = SolveConfig(),
                strength: int | None = None, retries: int = 3, max_lateral: int = 0):
    """Shrink an admissible symmetric rule to ``n_points`` by orbit elimination.

    Each step removes one orbit, or replaces it with one or two orbits of
    smaller total cardinality drawn at random.  The surviving parameters
    warm-start a separable solve, and the first move that yields an
    admissible rule is kept.  Lightest orbits (cardinality times weight) are
    tried first.  When no shrinking move works, up to ``max_lateral`` moves
    may swap an orbit for others with the same point count, into signatures
    not seen before.  The search is greedy, so different ``config.rng_seed``
    values follow different paths.

    Returns a :class:`SearchResult`; ``rule`` is ``None`` unless exactly
    ``n_points`` points were reached.
    """
    kind = rule.kind
    strength = rule.strength if strength is None else strength
    if strength > rule.strength:
        raise ParameterError("cannot reduce to a strength above the starting rule's")
    if n_points > rule.n_points:
        raise ParameterError(f"starting rule has only {rule.n_points} points")
    system = moment_system(kind, strength)
    cards = {f.family_id: f.cardinality for f in orbit_families(kind)}
    rng = np.random.default_rng(config.rng_seed)

    def solve(orbits, x0):
        fids = [f for f, _ in orbits]
        counts = tuple((g, fids.count(g)) for g in sorted(set(fids)))
        problem = _Problem(system, Decomposition(kind, counts))
        x, _, iters = _levenberg_marquardt(lambda xs: problem.separable(xs, config.penalty_on),
                                           x0, problem.clamp, config.max_iterations,
                                           min(config.tol, DOUBLE_TOL))
        w = problem.weights(x)
        cost = float(np.linalg.norm(problem.separable(x[None], False)[0]))
        return problem, x, w, cost, iters

    orbits = sorted(((o.family_id, np.array([float(v) for v in o.params]))
                     for o in rule.orbits), key=lambda o: o[0])
    state = solve(orbits, np.concatenate([p for _, p in orbits]))
    if not _admissible(*state[:4], 1e-11):
        raise ParameterError(f"starting rule does not reach strength {strength}")
    total_iters, attempts = state[4], 1
    seen = {state[0].dec.signature}
    lateral_left = max_lateral
    while sum(cards[f] for f, _ in orbits) > n_points:
        moved = False
        for lateral in (False, True):
            if lateral and lateral_left <= 0:
                break
            w = state[2]
            fids = [f for f, _ in orbits]
            mass = np.array([cards[f] for f in fids]) * w
            for k, added in _orbit_moves(fids, mass, cards, lateral):
                kept = [o for i, o in enumerate(orbits) if i != k]
                new_fids = sorted([f for f, _ in kept] + list(added))
                if not new_fids:
                    continue
                sig = Decomposition(kind, tuple((g, new_fids.count(g))
                                                for g in sorted(set(new_fids)))).signature
                if sig in seen or sum(cards[f] for f in new_fids) < n_points:
                    continue
                for trial in range(retries):
                    rest = kept + [(g, family(kind, g).sample(rng)) for g in added]
                    rest.sort(key=lambda o: o[0])
                    x0 = np.concatenate([p for _, p in rest])
                    if trial:
                        x0 = x0 + 0.02 * rng.standard_normal(x0.size)
                    cand = solve(rest, x0)
                    total_iters += cand[4]
                    attempts += 1
                    if _admissible(*cand[:4], 1e-11):
                        orbits = list(zip([f for f, _ in rest], cand[0].split(cand[1])))
                        state, moved = cand, True
                        seen.add(sig)
                        lateral_left -= lateral
                        log.info("%s to %d points: %s", "moved" if lateral else "reduced",
                                 cand[0].dec.total_points, sig)
                        break
                if moved:
                    break
            if moved:
                break
        if not moved:
            break
    problem, x, w, cost = state[:4]
    reached = problem.dec.total_points == n_points
    if reached and config.precision_mode == "extended":
        x, w, cost = _refine_extended(problem, x, w, tol=config.tol)
    out = _make_rule(problem, x, w, strength) if reached else None
    return SearchResult(problem.dec, out, float(cost), total_iters, attempts, x, w)


@dataclass(frozen=True)
class VerifyReport:
    strength: int
    max_error: float
    worst_monomial: tuple | None
    positive_weights: bool
    contained: bool
    weight_sum_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return (self.max_error <= self.tol and self.positive_weights and self.contained)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = "" if self.worst_monomial is None else \
            " worst=x^" + ",".join(map(str, self.worst_monomial))
        return (f"{status} strength={self.strength} max_rel_error={self.max_error:.3e}"
                f"{worst} positive={self.positive_weights} inside={self.contained}")


def verify_rule(rule: QuadratureRule, strength: int | None = None, extended=False,
                tol=None) -> VerifyReport:
    """Check a rule against exact monomial integrals up to ``strength``."""
    strength = rule.strength if strength is None else int(strength)
    if tol is None:
        tol = 1e-25 if extended else 1e-12
    exps = monomial_exponents(strength)
    pts, wts = rule.expanded(extended)
    vals = eval_monomials(pts, exps)
    quad = wts.dot(vals)
    worst, worst_e = 0.0, None
    for e, q in zip(exps, quad):
        exact = monomial_integral(rule.kind, *e, extended=extended)
        err = float(abs(q - exact) / max(1, abs(exact)))
        if err > worst or worst_e is None:
            worst, worst_e = err, e
    wf = np.array([float(v) for v in wts])
    return VerifyReport(
        strength=strength,
        max_error=worst,
        worst_monomial=worst_e if worst > 0 else None,
        positive_weights=bool(np.all(wf > 0)),
        contained=bool(np.all(contains(rule.kind, pts, 1e-12))),
        weight_sum_error=float(abs(wts.sum() - (monomial_integral(rule.kind, 0, 0, 0, 0,
                                                                  extended=extended)))),
        tol=tol,
    )




def polish_rule(rule: QuadratureRule, tol=EXTENDED_TOL, max_iter=25):
    """Refine a symmetric rule's orbit parameters and weights in extended precision.

    Returns ``(rule, residual_norm)``; the residual is the extended-precision
    norm of the reduced moment equations.
    """
    if not rule.is_symmetric:
        raise ParameterError("only orbit-form rules can be polished")
    dec = parse_signature(rule.kind, rule.signature())
    problem = _Problem(moment_system(rule.kind, rule.strength), dec)
    order = sorted(range(len(rule.orbits)), key=lambda i: rule.orbits[i].family_id)
    orbits = [rule.orbits[i] for i in order]
    x = np.array([float(p) for o in orbits for p in o.params])
    w = np.array([float(o.weight) for o in orbits])
    xe, we, res = _refine_extended(problem, x, w, max_iter=max_iter, tol=tol)
    new = _make_rule(problem, xe, we, rule.strength, rule.provenance)
    return new, float(res)
