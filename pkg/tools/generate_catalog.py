"""Offline generation of the bundled symmetric rules.

Two strategies are available:

* Screening (default).  Every decomposition gets a few short starts, then the
  most promising ones get many.
* Orbit reduction (``--reduce-from``).  Start from a larger admissible rule
  and remove or replace orbits until the target count is reached.  The start
  is a bundled rule (``bundled:<strength>``, for instance a higher-strength
  rule), a tet-prism tensor rule (``tensor:<tet signature>:<GL points>``),
  a rule file, or a decomposition signature that is solved first.

Found rules are polished in extended precision, verified, and written to
``src/stquad/rules``.

    python tools/generate_catalog.py tetprism 6 61 --screen-starts 3 --deep-starts 64
    python tools/generate_catalog.py tetprism 6 61 --reduce-from "S4^6 S8^2" --seeds 1 2 3
    python tools/generate_catalog.py pentatope 8 105 --reduce-from bundled:9
    python tools/generate_catalog.py tetprism 8 114 --reduce-from "tensor:S3^4 S5^1 S7^2:5"
"""
import argparse
import logging
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from stquad.basis import total_degree_indices, vandermonde
from stquad.decomp import enumerate_decompositions, parse_signature
from stquad.elements import ElementKind, sample_points, volume
from stquad.quadgen import (DOUBLE_TOL, MomentSystem, SolveConfig, _admissible,
                            _independent_columns, _levenberg_marquardt, _Problem, moment_system,
                            polish_rule, reduce_rule, solve_decomposition, verify_rule)
from stquad.rules import Orbit, QuadratureRule, get_rule, read_rule, rule_path, write_rule
from stquad.symmetry import transform_points

ROOT = Path(__file__).resolve().parents[1] / "src" / "stquad" / "rules"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("element")
    ap.add_argument("strength", type=int)
    ap.add_argument("points", type=int)
    ap.add_argument("--screen-starts", type=int, default=3)
    ap.add_argument("--screen-iterations", type=int, default=80)
    ap.add_argument("--deep-starts", type=int, default=64)
    ap.add_argument("--deep-count", type=int, default=40)
    ap.add_argument("--max-extra-params", type=int, default=None,
                    help="skip decompositions with more than n_equations + this many unknowns")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--reduce-from", metavar="START",
                    help="bundled:<strength>, tensor:<tet signature>:<GL points>, "
                         "a rule file, or a decomposition signature")
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4, 5, 6, 7],
                    help="reduction paths to try, in order")
    ap.add_argument("--max-lateral", type=int, default=20,
                    help="same-size orbit swaps allowed when reduction is stuck")
    ap.add_argument("--start-attempts", type=int, default=256,
                    help="random starts for solving a signature given to --reduce-from")
    ap.add_argument("--out", type=Path, default=ROOT)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    t0 = time.time()
    if args.reduce_from:
        found = reduction(args)
    else:
        found = screening(args)
    print(f"search time {time.time() - t0:.0f}s", flush=True)
    if found is None:
        print("no rule found")
        return 2
    rule, resid = polish_rule(found.rule)
    rule.provenance = "generated"
    rep_d, rep_e = verify_rule(rule), verify_rule(rule, extended=True)
    print(rule.signature(), f"extended residual {resid:.3e}")
    print(rep_d.summary())
    print(rep_e.summary())
    rule.validate()
    dest = rule_path(args.element, args.strength, args.points, root=args.out)
    write_rule(rule, dest)
    print("wrote", dest)
    return 0


def tensor_prism_rule(strength, tet_signature, n_gl, seed=0, attempts=256):
    """Symmetric tetrahedron rule times Gauss-Legendre in x4, as a prism rule.

    The tetrahedron rule is solved with midplane orbits only, against the
    invariant equations whose basis functions do not depend on x4.  Those
    weights integrate over the full prism, so each x4 node takes a share
    proportional to its Gauss-Legendre weight (the weights sum to 2).
    """
    kind = ElementKind.TETPRISM
    indices = [m for m in total_degree_indices(strength) if tuple(m)[3] == 0]
    rng = np.random.default_rng(seed)
    pts = sample_points(kind, 400, rng)
    sym = sum(vandermonde(kind, indices, img, check=False) for img in transform_points(kind, pts))
    reps = tuple(indices[j] for j in _independent_columns(sym))
    rhs = np.zeros(len(reps))
    rhs[0] = np.sqrt(volume(kind))
    problem = _Problem(MomentSystem(kind, strength, reps, rhs), parse_signature(kind, tet_signature))
    for _ in range(attempts):
        x, _, _ = _levenberg_marquardt(lambda xs: problem.separable(xs), problem.sample(rng),
                                       problem.clamp, 400, DOUBLE_TOL)
        w = problem.weights(x)
        cost = float(np.linalg.norm(problem.separable(x[None], False)[0]))
        if _admissible(problem, x, w, cost, 1e-11):
            break
    else:
        return None
    nodes, gl_weights = np.polynomial.legendre.leggauss(n_gl)
    orbits = []
    for fam, p, wo in zip(problem.fams, problem.split(x), w):
        for z, g in zip(nodes, gl_weights):
            if abs(z) < 1e-14:
                orbits.append(Orbit(fam.family_id, tuple(p), wo * g / 2))
            elif z > 0:
                # the even family with the same tetrahedral pattern, extruded to +-z
                orbits.append(Orbit(fam.family_id + 1, tuple(p) + (z,), wo * g / 2))
    return QuadratureRule(kind, strength, orbits)


def reduction(args):
    config = SolveConfig(max_iterations=400)
    if args.reduce_from.startswith("bundled:"):
        start = get_rule(args.element, int(args.reduce_from.split(":", 1)[1]))
    elif args.reduce_from.startswith("tensor:"):
        _, tet_sig, n_gl = args.reduce_from.split(":")
        start = tensor_prism_rule(args.strength, tet_sig, int(n_gl), args.seed,
                                  args.start_attempts)
        if start is None:
            print(f"no tetrahedron rule for {tet_sig}")
            return None
    elif Path(args.reduce_from).is_file():
        start = read_rule(args.reduce_from)
    else:
        res = solve_decomposition(args.element, args.strength, args.reduce_from,
                                  SolveConfig(n_starts=args.start_attempts, max_iterations=400,
                                              rng_seed=args.seed))
        if not res.success:
            print(f"no starting rule for {args.reduce_from} (residual {res.residual:.2e})")
            return None
        start = res.rule
    print(f"{args.element} P={args.strength} N={args.points}: reducing from "
          f"{start.n_points} points ({start.signature()})", flush=True)
    for seed in args.seeds:
        res = reduce_rule(start, args.points, replace(config, rng_seed=seed),
                          strength=args.strength, max_lateral=args.max_lateral)
        print(f"seed {seed}: {res.decomposition.signature} "
              f"({res.decomposition.total_points} points)", flush=True)
        if res.success:
            return res
    return None


def screening(args):
    system = moment_system(args.element, args.strength)
    decs = [d for d in enumerate_decompositions(args.element, args.points)
            if d.n_free_params >= system.n_equations]
    if args.max_extra_params is not None:
        decs = [d for d in decs if d.n_free_params <= system.n_equations + args.max_extra_params]
    print(f"{args.element} P={args.strength} N={args.points}: "
          f"{system.n_equations} equations, {len(decs)} decompositions", flush=True)

    screen = SolveConfig(n_starts=args.screen_starts, max_iterations=args.screen_iterations,
                         rng_seed=args.seed)
    found, scored = None, []
    for d in decs:
        res = solve_decomposition(args.element, args.strength, d, screen)
        if res.success:
            found = res
            break
        scored.append((res.residual, d))
    if found is None:
        scored.sort(key=lambda t: t[0])
        deep = SolveConfig(n_starts=args.deep_starts, rng_seed=args.seed + 1)
        for _, d in scored[:args.deep_count]:
            res = solve_decomposition(args.element, args.strength, d, deep)
            if res.success:
                found = res
                break
    return found


if __name__ == "__main__":
    raise SystemExit(main())
