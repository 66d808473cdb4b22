"""Command-line entry point: machine-readable access to every verifier,
law table, scaling check and sampler.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage / out-of-regime
parameters.  All randomness is governed by --seed (+ --streams sharding);
every report embeds the schema tag, package version and the full parameter
set, so runs are self-describing.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .exact import RegimeError, UnsupportedExactModeError, parse_rat, prob_json
from .paths import Path, HorizonCapError
from .processes import (
    Params,
    chain_increment_law,
    parse_initial_law,
    walk_law,
)
from .representation import (
    LevelLaw,
    damage_check,
    g_law_from_initial,
    rhs_law_enumeration,
    verify_thm1,
    verify_two_sided,
)
from .conditioning import conditioned_walk_law, v_law_from_initial
from .scaling import (
    LimitLevelLaw,
    MuMeasure,
    continuity_check,
    kernel_limit_ladder,
    limit_process_sample,
)
from .sampling import (
    RngStream,
    ks_distance,
    ks_two_sample_critical,
    sample_chain,
    sample_walk,
)
from .transform import preimage, tropical_identities_batch
from .paths import enumerate_paths

SCHEMA = "report-v1"


def _emit(report: dict, args) -> int:
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "command": report.pop("command", None) or report.get("check"),
        **report,
    }
    status = report.get("status", "PASS")
    if getattr(args, "out", "json") == "csv" and "rows" in report:
        cols = list(report["rows"][0])
        print(",".join(cols))
        for row in report["rows"]:
            print(",".join(str(row[c]) for c in cols))
    else:
        print(json.dumps(report, indent=2, default=str))
    return 0 if status in ("PASS", None) else 1


def _params(args) -> Params:
    return Params(parse_rat(args.rho), parse_rat(args.sigma))


def _level_law_arg(text: str) -> LevelLaw:
    kind, _, arg = text.partition(":")
    if kind == "geo":
        return LevelLaw.geometric(parse_rat(arg))
    if kind == "point":
        return LevelLaw.point(int(arg))
    if kind == "finite":
        masses = {}
        for item in arg.split(","):
            lvl, _, mass = item.partition("=")
            masses[int(lvl)] = parse_rat(mass)
        return LevelLaw.from_pmf(masses)
    raise ValueError(f"unknown level-law string {text!r}")


def _grid(text: str):
    start, stop, step = (float(v) for v in text.split(":"))
    out, x = [], start
    while x <= stop + 1e-12:
        out.append(round(x, 12))
        x += step
    return out


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _thm1_shard(payload):
    rho, sigma, initial, part, candidate, t = payload
    law = parse_initial_law(initial)
    cand = _level_law_arg(candidate) if candidate else None
    return verify_thm1(t, law, Params(parse_rat(rho), parse_rat(sigma)),
                       part=part, candidate=cand, t_values=[t])


def _cmd_verify_thm1(args):
    law = parse_initial_law(args.initial)
    candidate = _level_law_arg(args.candidate) if args.candidate else None
    if args.jobs > 1:
        # one shard per horizon; results merged in horizon order
        from concurrent.futures import ProcessPoolExecutor

        payloads = [(args.rho, args.sigma, args.initial, args.part,
                     args.candidate, t) for t in range(1, args.t + 1)]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            shards = list(pool.map(_thm1_shard, payloads))
        report = shards[0]
        for shard in shards[1:]:
            if shard["max_abs_diff"]["float"] > report["max_abs_diff"]["float"]:
                report["max_abs_diff"] = shard["max_abs_diff"]
                report["witness"] = shard["witness"]
            if shard["status"] == "FAIL":
                report["status"] = "FAIL"
        report["t_max"] = args.t
        report["jobs"] = args.jobs
    else:
        report = verify_thm1(args.t, law, _params(args), part=args.part,
                             candidate=candidate)
    report["command"] = "verify thm1"
    return report


def _cmd_verify_thm2(args):
    params = _params(args)
    law = parse_initial_law(args.initial)
    vlaw = v_law_from_initial(law, params, args.part)
    worst, witness = Fraction(0), None
    for t in range(1, args.t + 1):
        cond = conditioned_walk_law(t, vlaw, params, args.part)
        chain = chain_increment_law(t, law, params)
        d, w = chain.max_abs_diff(cond)
        if d > worst:
            worst, witness = d, str(w)
    return {
        "command": "verify thm2",
        "check": "thm2",
        "part": args.part,
        "params": params.to_json(),
        "initial": law.cli_string(),
        "t_max": args.t,
        "max_abs_diff": prob_json(worst),
        "witness": witness,
        "status": "PASS" if worst == 0 else "FAIL",
    }


def _cmd_verify_two_sided(args):
    report = verify_two_sided(args.t, parse_initial_law(args.initial), _params(args))
    report["command"] = "verify two-sided"
    return report


def _cmd_verify_tropical(args):
    violations = 0
    for t in range(args.t_exhaustive + 1):
        vals = np.array(
            [p.values for p in enumerate_paths(t)], dtype=np.int64
        ).reshape(-1, t + 1)
        for g1 in range(t + 2):
            for g2 in range(t + 2):
                rep = tropical_identities_batch(vals, g1, g2)
                violations += sum(v for k, v in rep.items() if k != "ok")
    # random phase: one stream per shard, fresh (g1, g2) per shard
    shards = max(1, args.streams)
    for i in range(shards):
        m = args.samples // shards + (1 if i < args.samples % shards else 0)
        gen = RngStream(args.seed, i).generator()
        steps = gen.integers(-1, 2, size=(m, args.t_random))
        vals = np.concatenate(
            [np.zeros((m, 1), dtype=np.int64), np.cumsum(steps, axis=1)], axis=1
        )
        g1, g2 = (int(g) for g in gen.integers(0, args.g_max + 1, size=2))
        rep = tropical_identities_batch(vals, g1, g2)
        violations += sum(v for k, v in rep.items() if k != "ok")
    return {
        "command": "verify tropical",
        "check": "tropical",
        "t_exhaustive": args.t_exhaustive,
        "random": {"samples": args.samples, "t": args.t_random, "g_max": args.g_max,
                   "seed": args.seed, "streams": args.streams},
        "violations": violations,
        "status": "PASS" if violations == 0 else "FAIL",
    }


def _cmd_verify_damage(args):
    report = damage_check(parse_rat(args.q), parse_rat(args.theta), args.nmax)
    report["command"] = "verify damage"
    return report


def _cmd_preimage(args):
    x = Path.parse(args.path)
    report = preimage(x).to_json()
    report.update({"command": "preimage", "check": "preimage", "path": str(x),
                   "status": "PASS"})
    return report


def _cmd_law(args):
    params = _params(args)
    if args.object != "walk" and not (args.initial or args.glaw):
        raise ValueError(f"law {args.object} needs --initial (or --glaw for rhs)")
    if args.object == "walk":
        table = walk_law(args.t, params)
    elif args.object == "chain":
        table = chain_increment_law(args.t, parse_initial_law(args.initial), params,
                                    route=args.route)
    elif args.object == "rhs":
        if args.glaw:
            glaw = _level_law_arg(args.glaw)
        else:
            glaw = g_law_from_initial(parse_initial_law(args.initial), params, "G")
        table = rhs_law_enumeration(args.t, glaw, params)
    elif args.object == "level":
        glaw = g_law_from_initial(parse_initial_law(args.initial), params,
                                  args.which)
        entries = {n: prob_json(glaw.pmf(n)) for n in range(args.nmax + 1)}
        return {"command": "law level", "check": "law", "params": params.to_json(),
                "which": args.which, "pmf": entries, "status": "PASS"}
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.object)
    report = {"command": f"law {args.object}", "check": "law",
              "params": params.to_json(), "table": table.to_json(),
              "mass": prob_json(table.mass()), "status": "PASS"}
    return report


def _cmd_scaling_continuity(args):
    report = continuity_check(args.N, parse_rat(args.v), args.regime,
                              _grid(args.grid), u=parse_rat(args.u) if args.u else None,
                              power_eps=args.power_eps, point_scale=args.point_scale)
    report["command"] = "scaling continuity"
    report["status"] = "PASS" if report["sup_distance"] <= args.tol else "FAIL"
    report["tol"] = args.tol
    return report


def _cmd_scaling_kernel(args):
    Ns = [int(n) for n in args.N.split(",")]
    report = kernel_limit_ladder(Ns, args.t, args.x, args.y, args.v)
    report["command"] = "scaling kernel"
    report["status"] = "PASS" if report["rel_errors"][-1] <= args.tol else "FAIL"
    report["tol"] = args.tol
    return report


def _cmd_scaling_donsker(args):
    import math

    seed = RngStream(args.seed)
    sn = math.isqrt(args.N)
    if sn * sn != args.N:
        raise ValueError("N must be a perfect square")
    v = parse_rat(args.v)
    params = Params(1 - v / sn, parse_rat(args.sigma))
    law = parse_initial_law(args.initial)

    from .processes import PointMass, QNegativeBinomial

    if isinstance(law, PointMass):
        mu = MuMeasure.point(law.n / sn)
    elif isinstance(law, QNegativeBinomial) and law.q == params.q:
        rho0 = law.theta * params.rho
        u = float((1 - rho0) * sn)
        if not (u + float(v) > 0 and u - float(v) > 0):
            raise ValueError("qnb donsker check needs u - |v| > 0")
        mu = MuMeasure.hypoexponential(u + float(v), u - float(v))
    else:
        raise ValueError(
            f"donsker check supports point:<n> and matched qnb initial laws, "
            f"got {law.cli_string()!r}"
        )

    chains = sample_chain(args.N, law, params, seed.child(1), n=args.samples)
    k_chain = (chains[:, -1] - chains[:, 0]).astype(np.int64)

    gamma = LimitLevelLaw(float(v), mu)
    lim = limit_process_sample(float(v), gamma, [1.0], args.steps,
                               seed.child(2), n=args.samples,
                               sigma=float(parse_rat(args.sigma)))[:, 0]
    # compare on the chain's integer lattice (nearest-point rounding is the
    # local-CLT continuity correction)
    stat = ks_distance(k_chain, np.round(lim * sn).astype(np.int64))
    crit = ks_two_sample_critical(args.samples, args.samples, 0.01)
    return {
        "command": "scaling donsker",
        "check": "donsker",
        "N": args.N, "samples": args.samples, "steps": args.steps,
        "seed": args.seed, "params": params.to_json(), "initial": law.cli_string(),
        "gamma_measure": mu.describe(),
        "ks": stat, "critical_1pct": crit,
        "status": "PASS" if stat < crit else "FAIL",
    }


def _shard_sizes(total, streams):
    return [total // streams + (1 if i < total % streams else 0) for i in range(streams)]


def _cmd_sample(args):
    streams = max(1, args.streams)
    sizes = _shard_sizes(args.samples, streams)
    keys = [RngStream(args.seed, args.stream + i) for i in range(streams)]

    def shard(draw):
        # one independent stream per worker slot, assembled in stream order
        return np.concatenate([draw(k, m) for k, m in zip(keys, sizes) if m], axis=0)

    if args.object == "walk":
        vals = shard(lambda k, m: sample_walk(args.t, _params(args), k, n=m))
    elif args.object == "chain":
        law = parse_initial_law(args.initial)
        vals = shard(lambda k, m: sample_chain(args.t, law, _params(args), k, n=m))
    else:  # limit-process
        gamma = LimitLevelLaw(float(parse_rat(args.v)), MuMeasure.point(args.gamma_point))
        grid = _grid(args.grid)
        v, sig = float(parse_rat(args.v)), float(parse_rat(args.sigma))
        vals = shard(lambda k, m: limit_process_sample(v, gamma, grid, args.steps,
                                                       k, n=m, sigma=sig))
        return {"command": "sample limit-process", "check": "sample", "seed": args.seed,
                "streams": streams, "grid": grid,
                "paths": [list(map(float, row)) for row in vals],
                "status": "PASS"}
    return {"command": f"sample {args.object}", "check": "sample", "seed": args.seed,
            "streams": streams, "params": _params(args).to_json(),
            "paths": [",".join(map(str, row)) for row in vals.tolist()],
            "status": "PASS"}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_params(p, rho_required=True):
    p.add_argument("--rho", required=rho_required, help="walk asymmetry, a rational like 1/2")
    p.add_argument("--sigma", default="0", help="flat-step weight, rational (default 0)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pitman-lab",
        description="exact verification and simulation lab for max-transform "
                    "representations of lattice walks",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    ver = sub.add_parser("verify", help="run an exact identity check")
    vsub = ver.add_subparsers(dest="what", required=True)

    p = vsub.add_parser("thm1", help="chain law == transformed-walk law")
    _add_params(p)
    p.add_argument("--t", type=int, default=4)
    p.add_argument("--initial", required=True)
    p.add_argument("--part", choices=["I", "II"], default="I")
    p.add_argument("--candidate", help="level law to test instead of the derived one")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes (one horizon per shard)")
    p.set_defaults(fn=_cmd_verify_thm1)

    p = vsub.add_parser("thm2", help="chain law == conditioned-walk law")
    _add_params(p)
    p.add_argument("--t", type=int, default=4)
    p.add_argument("--initial", required=True)
    p.add_argument("--part", choices=["I", "II"], default="I")
    p.set_defaults(fn=_cmd_verify_thm2)

    p = vsub.add_parser("two-sided", help="plain vs sign-flipped representations")
    _add_params(p)
    p.add_argument("--t", type=int, default=4)
    p.add_argument("--initial", required=True)
    p.set_defaults(fn=_cmd_verify_two_sided)

    p = vsub.add_parser("tropical", help="max-plus operator identities")
    p.add_argument("--t-exhaustive", type=int, default=6)
    p.add_argument("--t-random", type=int, default=50)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--g-max", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--streams", type=int, default=20,
                   help="independent sample shards, one rng stream each")
    p.set_defaults(fn=_cmd_verify_tropical)

    p = vsub.add_parser("damage", help="independent split of a q-negative-binomial count")
    p.add_argument("--q", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--nmax", type=int, default=60)
    p.set_defaults(fn=_cmd_verify_damage)

    p = sub.add_parser("preimage", help="complete inverse image of a path")
    p.add_argument("--path", required=True, help="comma-separated values, e.g. 0,1,0,-1")
    p.set_defaults(fn=_cmd_preimage)

    p = sub.add_parser("law", help="emit an exact law table")
    p.add_argument("object", choices=["chain", "walk", "rhs", "level"])
    _add_params(p)
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--initial", help="initial law string")
    p.add_argument("--glaw", help="explicit level law for the rhs table")
    p.add_argument("--route", choices=["formula", "product"], default="formula")
    p.add_argument("--which", choices=["G", "Gtilde"], default="G")
    p.add_argument("--nmax", type=int, default=20)
    p.set_defaults(fn=_cmd_law)

    sc = sub.add_parser("scaling", help="continuum-limit checks")
    ssub = sc.add_subparsers(dest="what", required=True)

    p = ssub.add_parser("continuity", help="scaled level law vs its continuum CDF")
    p.add_argument("--N", type=int, default=10000)
    p.add_argument("--v", default="1/2")
    p.add_argument("--regime", choices=["point", "power", "corollary"], default="point")
    p.add_argument("--grid", default="0.1:3.0:0.1")
    p.add_argument("--u", help="second rate for the corollary regime")
    p.add_argument("--power-eps", type=float, default=0.2)
    p.add_argument("--point-scale", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=0.02)
    p.add_argument("--out", choices=["json", "csv"], default="json")
    p.set_defaults(fn=_cmd_scaling_continuity)

    p = ssub.add_parser("kernel", help="transition-kernel limit error ladder")
    p.add_argument("--N", default="100,10000", help="comma-separated ladder")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--y", type=float, default=1.0)
    p.add_argument("--v", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=0.05)
    p.set_defaults(fn=_cmd_scaling_kernel)

    p = ssub.add_parser("donsker", help="chain marginal vs Brownian functional (KS)")
    p.add_argument("--N", type=int, default=2500)
    p.add_argument("--v", default="2/5")
    p.add_argument("--sigma", default="2")
    p.add_argument("--initial", default="point:0")
    p.add_argument("--samples", type=int, default=20000)
    p.add_argument("--steps", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--streams", type=int, default=2,
                   help="independent streams (chain side, limit side, ...)")
    p.set_defaults(fn=_cmd_scaling_donsker)

    sa = sub.add_parser("sample", help="reproducible draws")
    sasub = sa.add_subparsers(dest="object_parser", required=True)
    for obj in ("walk", "chain", "limit-process"):
        p = sasub.add_parser(obj)
        p.set_defaults(object=obj, fn=_cmd_sample)
        _add_params(p, rho_required=(obj != "limit-process"))
        p.add_argument("--t", type=int, default=10)
        p.add_argument("--initial", default="point:0")
        p.add_argument("--samples", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--stream", type=int, default=0)
        p.add_argument("--streams", type=int, default=1,
                       help="worker streams (results are stream-indexed)")
        if obj == "limit-process":
            p.add_argument("--v", default="0")
            p.add_argument("--gamma-point", type=float, default=0.0)
            p.add_argument("--grid", default="0.0:1.0:0.125")
            p.add_argument("--steps", type=int, default=1024)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        report = args.fn(args)
    except (RegimeError, UnsupportedExactModeError, HorizonCapError, ValueError) as exc:
        print(json.dumps({"schema": SCHEMA, "version": __version__,
                          "error": str(exc), "status": "USAGE"}), file=sys.stderr)
        return 2
    return _emit(report, args)


if __name__ == "__main__":
    sys.exit(main())
