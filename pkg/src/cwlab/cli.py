"""Batch command runner.

Every command writes one CSV or JSON document, to ``--out`` or stdout.  CSV
output starts with a ``#`` provenance line; JSON output carries the same
data under a ``provenance`` key.  Files are written atomically, so a failed
run leaves nothing behind.  Exit status: 0 success, 1 runtime failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
import tempfile
from fractions import Fraction

import mpmath
import numpy as np

from . import __version__
from .carpet import (
    ANTIPODAL_MODE,
    UNIFORM,
    carpet_periodic_count,
    circle_mass_fraction,
    closed_form_count,
    projected_discrepancy,
    read_registry,
    registry_from_periods,
)
from .entropy import entropy_estimate, periodic_growth, separation_certificate
from .exactlat import IntMatrix2, mat_pow
from .measures import discrepancy, homogeneity_probe, periodic_measure
from .shadowing import (
    EXACT,
    HIGHPREC,
    PseudoOrbit,
    SpecificationRequest,
    make_pseudo_orbit,
    periodic_specification,
    shadow_periodic,
    shadow_periodic_sphere,
)
from .sphere import sphere_periodic_points
from .toral import (
    ANTIPODAL,
    PERIODIC,
    TorusPoint,
    antipodal_periodic_points,
    periodic_points,
    random_periodic_point,
)


class ConfigError(ValueError):
    pass


def parse_range(text) -> list:
    """``"1..12"``, ``"3,4,5"`` or a single integer."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cwlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="command")

    def common(sp):
        sp.add_argument("--config", help="JSON file of option defaults (keys are option names)")
        sp.add_argument("--matrix", default="2 1 1 1", help='matrix entries "a b c d" (row major)')
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--seed", type=int)
        return sp

    sp = common(sub.add_parser("count", help="Per_n, Per_n^- and sphere counts"))
    sp.add_argument("--n-range", default="1..12")
    sp.add_argument("--verify", action="store_true", help="enumerate the sets and check the fibers")

    sp = common(sub.add_parser("enumerate", help="list periodic points as CSV"))
    sp.add_argument("--n", type=int, required=False)
    sp.add_argument("--kind", choices=(PERIODIC, ANTIPODAL, "sphere"), default=PERIODIC)

    sp = common(sub.add_parser("shadow", help="periodic shadowing of a pseudo-orbit"))
    sp.add_argument("--input", help="pseudo-orbit file; otherwise one is generated")
    sp.add_argument("--n", type=int, help="length of the generated pseudo-orbit")
    sp.add_argument("--delta", help="jump size of the generated pseudo-orbit")
    sp.add_argument("--x0", help='base point "p/q r/s"; default a seeded random period-n point')
    sp.add_argument("--space", choices=("torus", "sphere"), default="torus")
    sp.add_argument("--mode", choices=(EXACT, HIGHPREC), default=EXACT)

    sp = common(sub.add_parser("spec", help="periodic point realising orbit segments"))
    sp.add_argument("--point", action="append", help='segment start "p/q r/s" (repeat)')
    sp.add_argument("--length", action="append", type=int, help="segment length (repeat, same order)")
    sp.add_argument("--L", type=int, default=12, help="gap between segments")

    sp = common(sub.add_parser("measure", help="periodic measure and its character discrepancy"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--n-range")
    sp.add_argument("--K", type=int, default=3)
    sp.add_argument("--space", choices=("torus", "sphere"), default="torus")
    sp.add_argument("--starred", action="store_true")
    sp.add_argument("--atoms", action="store_true", help="emit the atoms as CSV instead of the report")

    sp = common(sub.add_parser("entropy", help="separated-set slopes, periodic growth, separation check"))
    sp.add_argument("--task", choices=("slope", "growth", "separation"), default="slope")
    sp.add_argument("--n-range", default="4..10")
    sp.add_argument("--delta", default="1/10")
    sp.add_argument("--scheme", choices=("grid", "periodic"), default="grid")
    sp.add_argument("--mesh", type=int, default=60)
    sp.add_argument("--space", choices=("torus", "sphere"), default="torus")

    sp = common(sub.add_parser("carpet", help="blow-up registry counts and projected measures"))
    sp.add_argument("--registry", help="registry file, one base point per line")
    sp.add_argument("--periods", help="build a registry from these periods, e.g. 3,4")
    sp.add_argument("--n-range", default="1..20")
    sp.add_argument("--period-mode", choices=(UNIFORM, ANTIPODAL_MODE), default=UNIFORM)
    sp.add_argument("--K", type=int, default=3)
    sp.add_argument("--validate", action="store_true", help="emit the registry validation report only")

    sp = common(sub.add_parser("homogeneity", help="normalised Bowen-ball masses"))
    sp.add_argument("--r", type=int, default=10)
    sp.add_argument("--n-range", default="2..5")
    sp.add_argument("--epsilon", default="1/10")
    sp.add_argument("--centers", type=int, default=50)
    sp.add_argument("--variant", choices=("torus", "torus_starred", "sphere_starred"), default="torus_starred")
    return p


def resolve(argv) -> argparse.Namespace:
    """Parse ``argv``; values from ``--config`` fill options not given on the command line."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        raise SystemExit(2)
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        if cfg.get("command", args.command) != args.command:
            raise ConfigError(f"config is for command {cfg['command']!r}, not {args.command!r}")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items() if k != "command"}
        sub = parser._subparsers._group_actions[0].choices[args.command]
        unknown = set(cfg) - {a.dest for a in sub._actions}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def config_dict(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("config", "out")}


def provenance(args) -> dict:
    cfg = config_dict(args)
    digest = hashlib.sha256(json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest()
    return {"tool": "cwlab", "version": __version__, "config_sha256": digest,
            "numpy": np.__version__, "mpmath": mpmath.__version__, "config": cfg}


def _csv_text(args, header, rows) -> str:
    prov = provenance(args)
    buf = io.StringIO()
    buf.write(f"# cwlab {prov['version']} command={args.command} config_sha256={prov['config_sha256']} "
              f"numpy={prov['numpy']} mpmath={prov['mpmath']}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(args, payload) -> str:
    return json.dumps({"provenance": provenance(args), **payload}, indent=2, default=str) + "\n"


def write_output(path, text: str) -> None:
    if not path:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cwlab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _matrix(args) -> IntMatrix2:
    A = IntMatrix2.parse(args.matrix)
    A.check_hyperbolic()
    return A


def _need_seed(args):
    if args.seed is None:
        raise ConfigError(f"{args.command} is randomised; pass --seed")
    return args.seed


def cmd_count(args) -> str:
    A = _matrix(args)
    rows = []
    for n in parse_range(args.n_range):
        t = mat_pow(A, n).trace
        row = [n, t - 2, t + 2, t]
        if args.verify:
            per, per_m = periodic_points(A, n), antipodal_periodic_points(A, n)
            sp = sphere_periodic_points(A, n, per, per_m)
            row += [len(per) == t - 2 and len(per_m) == t + 2 and len(sp) == t and sp.two_to_one]
        rows.append(row)
    header = ["n", "per", "per_antipodal", "per_sphere"] + (["verified"] if args.verify else [])
    return _csv_text(args, header, rows)


def cmd_enumerate(args) -> str:
    A = _matrix(args)
    if args.n is None:
        raise ConfigError("enumerate needs --n")
    if args.kind == "sphere":
        sp = sphere_periodic_points(A, args.n)
        rows = [[args.n, s.rep.x.numerator, s.rep.x.denominator, s.rep.y.numerator, s.rep.y.denominator,
                 int(s.is_spine)] for s in sp.points]
        return _csv_text(args, ["n", "x_num", "x_den", "y_num", "y_den", "spine"], rows)
    pset = periodic_points(A, args.n) if args.kind == PERIODIC else antipodal_periodic_points(A, args.n)
    rows = [[args.n, args.kind, p.x.numerator, p.x.denominator, p.y.numerator, p.y.denominator] for p in pset]
    return _csv_text(args, ["n", "kind", "x_num", "x_den", "y_num", "y_den"], rows)


def cmd_shadow(args) -> str:
    A = _matrix(args)
    if args.input:
        with open(args.input) as fh:
            po = PseudoOrbit.from_text(A, fh.read())
    else:
        if args.n is None or args.delta is None:
            raise ConfigError("shadow needs --input, or --n and --delta to generate a pseudo-orbit")
        seed = _need_seed(args)
        if args.x0:
            x0 = TorusPoint.parse(args.x0)
        else:
            x0 = random_periodic_point(A, args.n, random.Random(seed))
        po = make_pseudo_orbit(A, x0, args.n, Fraction(args.delta), seed, args.space)
    if not po.periodic:
        raise ValueError(po.diagnostic or "pseudo-orbit does not close up")
    fn = shadow_periodic_sphere if po.space == "sphere" else shadow_periodic
    res = fn(A, po, args.mode)
    return _json_text(args, {"result": json.loads(res.to_json()), "pseudo_orbit_delta": str(po.delta)})


def cmd_spec(args) -> str:
    A = _matrix(args)
    pts = args.point or []
    lengths = args.length or []
    if not pts or len(pts) != len(lengths):
        raise ConfigError("spec needs matching --point and --length options")
    req = SpecificationRequest([(TorusPoint.parse(p), l) for p, l in zip(pts, lengths)], args.L)
    res = periodic_specification(A, req)
    return _json_text(args, {"result": json.loads(res.to_json()), "layout": req.layout()})


def cmd_measure(args) -> str:
    A = _matrix(args)
    if args.atoms:
        if args.n is None:
            raise ConfigError("--atoms needs --n")
        mu = periodic_measure(A, args.n, args.space, args.starred)
        prov = provenance(args)
        return f"# cwlab {prov['version']} command=measure config_sha256={prov['config_sha256']}\n" + mu.to_csv()
    ns = parse_range(args.n_range) if args.n_range else [args.n]
    if ns == [None]:
        raise ConfigError("measure needs --n or --n-range")
    reports = {}
    for n in ns:
        rep = discrepancy(periodic_measure(A, n, args.space, args.starred), args.K)
        reports[str(n)] = json.loads(rep.to_json())
    return _json_text(args, {"discrepancy": reports})


def cmd_entropy(args) -> str:
    A = _matrix(args)
    if args.task == "growth":
        rows = [[r.n, r.trace, f"{r.log_rate:.12f}", r.lower_ok, r.upper_ok]
                for r in periodic_growth(A, parse_range(args.n_range))]
        return _csv_text(args, ["n", "per_sphere", "log_rate", "lambda_n_le_per", "per_le_2lambda_n"], rows)
    if args.task == "separation":
        cert = separation_certificate(A, max(parse_range(args.n_range)), Fraction(args.delta))
        rows = [[n, kind, failures] for (n, kind), failures in cert.items()]
        return _csv_text(args, ["n", "kind", "failing_pairs"], rows)
    est = entropy_estimate(A, Fraction(args.delta), parse_range(args.n_range), args.scheme, args.mesh, args.space)
    rows = [[n, str(est.delta), c, est.scheme, est.space] for n, c in est.counts.items()]
    rows.append(["slope", f"{est.slope:.6f}", f"reference {est.reference:.6f}",
                 f"relative_error {est.relative_error:.4f}", f"degenerate {est.degenerate}"])
    return _csv_text(args, ["n", "delta", "count", "scheme", "space"], rows)


def cmd_carpet(args) -> str:
    A = _matrix(args)
    if args.registry:
        with open(args.registry) as fh:
            reg = read_registry(A, fh.read(), density_mesh=20 if args.validate else 0)
    elif args.periods:
        reg = registry_from_periods(A, parse_range(args.periods), density_mesh=20 if args.validate else 0)
    else:
        raise ConfigError("carpet needs --registry or --periods")
    if args.validate:
        return _json_text(args, {"validation": json.loads(reg.report.to_json()),
                                 "orbits": [{"base": o.base.to_text(), "period": o.period,
                                             "lift_type": o.lift_type} for o in reg.orbits]})
    rows = []
    for n in parse_range(args.n_range):
        cc = carpet_periodic_count(A, reg, n, args.period_mode)
        frac = circle_mass_fraction(A, reg, n, args.period_mode)
        d = projected_discrepancy(A, reg, n, args.K, args.period_mode)
        rows.append([n, cc.sphere_count, cc.carpet_count, closed_form_count(A, reg.periods, n),
                     cc.within_square_bound, cc.dominates_sphere, cc.dominates_lambda_power,
                     str(frac), f"{float(d.value):.6e}"])
    header = ["n", "per_sphere", "per_carpet", "closed_form", "within_4n2", "carpet_ge_sphere",
              "carpet_ge_lambda_n", "circle_fraction", "projected_D"]
    return _csv_text(args, header, rows)


def cmd_homogeneity(args) -> str:
    A = _matrix(args)
    seed = _need_seed(args)
    table = homogeneity_probe(A, args.r, parse_range(args.n_range), Fraction(args.epsilon), args.centers,
                              seed, args.variant)
    rows = [[r["n"], f"{r['min']:.6f}", f"{r['max']:.6f}", f"{r['ratio']:.6f}", r["empty_balls"]]
            for r in table.to_rows()]
    rows.append(["spread", f"{table.ratio_spread:.6f}", "", "", ""])
    return _csv_text(args, ["n", "min_normalized", "max_normalized", "ratio", "empty_balls"], rows)


HANDLERS = {
    "count": cmd_count, "enumerate": cmd_enumerate, "shadow": cmd_shadow, "spec": cmd_spec,
    "measure": cmd_measure, "entropy": cmd_entropy, "carpet": cmd_carpet, "homogeneity": cmd_homogeneity,
}


def main(argv=None) -> int:
    try:
        args = resolve(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"cwlab: config error: {exc}", file=sys.stderr)
        return 2
    try:
        text = HANDLERS[args.command](args)
        write_output(args.out, text)
    except ConfigError as exc:
        print(f"cwlab: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, AssertionError, OSError, OverflowError) as exc:
        print(f"cwlab: {args.command} failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
