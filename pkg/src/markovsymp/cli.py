"""Command-line interface: ``markovsymp <subcommand> ...``, JSON on standard output.

Exit codes are 0 on success, 1 on domain errors (a JSON error object is
printed) and 2 on usage errors.  Numbers in JSON output are decimal strings.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import flows, liegen, markov, poisson, singular, tame
from .core.numeric import DEFAULT_PREC, MIN_PREC, complex_pair, ctx, precision
from .core.poly import PolySyntaxError, parse_poly
from .errors import InvalidInput, MarkovSympError
from .surface import SurfaceParams, SurfacePoint


@dataclass
class RunConfig:
    params: dict | None = None
    precision: int = DEFAULT_PREC
    seed: int = 0
    threads: int = 1
    output: str | None = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.precision < MIN_PREC:
            raise InvalidInput(f"precision must be at least {MIN_PREC} bits", input=self.precision)
        if self.threads < 1:
            raise InvalidInput("threads must be positive", input=self.threads)


def read_config(path: str) -> dict:
    """key = value lines; '#' starts a comment; values of params/tolerances are JSON."""
    out: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InvalidInput(f"cannot read config file: {exc.strerror}", input=path) from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"config line {n} is not key = value", input=raw.rstrip("\n"))
        key, value = (s.strip() for s in line.split("=", 1))
        if key in ("precision", "seed", "threads"):
            try:
                out[key] = int(value)
            except ValueError:
                raise InvalidInput(f"config key {key} needs an integer", input=value) from None
        elif key == "output":
            out[key] = value
        elif key == "params":
            out[key] = _json_arg(value, "params")
        elif key.startswith("tolerance."):
            out.setdefault("tolerances", {})[key.split(".", 1)[1]] = value
        elif key in "ABCDE" and len(key) == 1:
            out.setdefault("params", {})[key] = value
        else:
            raise InvalidInput(f"unknown config key {key!r}", input=raw.rstrip("\n"))
    return out


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{what} is not valid JSON: {exc.msg}", input=text) from None


def _params(args, cfg: RunConfig) -> SurfaceParams:
    if getattr(args, "surface", None) == "markov":
        return SurfaceParams.markov()
    raw = getattr(args, "params", None)
    data = _json_arg(raw, "params") if raw is not None else (cfg.params or {})
    return SurfaceParams.from_json(data)


def _poly(text: str):
    try:
        return parse_poly(text)
    except PolySyntaxError as exc:
        raise InvalidInput(str(exc), input=text) from None


# subcommands -------------------------------------------------------------------------

def cmd_classify(args, cfg):
    params = _params(args, cfg)
    reports = singular.classify_surface(params, method=args.method, seed=cfg.seed)
    return [r.to_json() for r in reports]


def cmd_flow(args, cfg):
    params = _params(args, cfg)
    pt = _json_arg(args.point, "point")
    if args.auto is not None:
        auto = flows.Automorphism.from_json(_json_arg(args.auto, "automorphism"))
    else:
        if args.axis is None or args.time is None:
            raise InvalidInput("flow needs --axis and --time, or --auto", input=sys.argv[1:])
        auto = flows.Automorphism((flows.axis_flow(args.axis, _time(args.time)),))
    start = SurfacePoint.from_json(params, pt)
    image = flows.apply(auto, params, start)
    out = {"point": start.to_json(), "image": image.to_json(), "automorphism": auto.to_json()}
    if args.symplectic:
        out["symplectic_defect"] = ctx.nstr(flows.check_symplectic(params, auto, start, ctx.mpf(args.h)), 10)
    if args.orbit_csv:
        _orbit_csv(args.orbit_csv, params, auto, start, args.orbit_samples)
        out["orbit_csv"] = args.orbit_csv
    return out


def _time(text: str):
    try:
        return Fraction(text)
    except ValueError:
        pass
    data = _json_arg(text, "time")
    return ctx.mpc(ctx.mpf(data[0]), ctx.mpf(data[1]))


def _orbit_csv(path, params, auto, start, samples):
    """Iterates of the automorphism, one point per row."""
    pt = start
    rows = ["k,x_re,x_im,y_re,y_im,z_re,z_im"]
    for k in range(samples + 1):
        rows.append(",".join([str(k)] + [s for c in pt.coords() for s in complex_pair(c, 17)]))
        pt = flows.apply(auto, params, pt, check=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def cmd_bracket(args, cfg):
    params = _params(args, cfg)
    f, g = _poly(args.f), _poly(args.g)
    out = {"f": f.to_string(), "g": g.to_string(), "bracket": poisson.bracket(f, g, params).to_string(),
           "params": params.to_json(), "convention": poisson.SIGN_CONVENTION}
    return out


def cmd_certify(args, cfg):
    params = _params(args, cfg)
    basis = liegen.close_span(params, args.max_gen_deg, args.max_deg, shuffle_seed=args.shuffle_seed)
    out = {"params": params.to_json(), "max_gen_deg": args.max_gen_deg, "max_deg": args.max_deg,
           "rank": basis.rank, "dimension": basis.dimension, "full_rank": basis.is_full(), "rounds": basis.rounds}
    if args.monomial:
        cert = liegen.certify_monomial(basis, _poly(args.monomial))
        out["certificate"] = cert.to_json() if cert else None
        out["verified"] = bool(cert) and cert.verify()
    else:
        certs = liegen.certify_all(basis)
        out["certified"] = sum(1 for c in certs.values() if c and c.verify())
        out["missing"] = [m for m, c in certs.items() if not c]
    return out


def cmd_markov(args, cfg):
    if args.action == "enumerate":
        return [list(t.as_tuple()) for t in markov.enumerate_ordered(args.bound)], "lines"
    if args.action == "fit":
        window = tuple(args.window) if args.window else None
        return markov.zagier_fit(args.count, window).to_json(), None
    if args.action == "lagrange":
        return {"z": str(args.z), "value": ctx.nstr(markov.lagrange_value(args.z), int(ctx.prec * 0.30103))}, None
    if args.action == "brute":
        return [list(t.as_tuple()) for t in markov.brute_force(args.bound)], "lines"
    raise InvalidInput("unknown markov action", input=args.action)


def cmd_tame(args, cfg):
    if args.action == "build":
        problem = tame.TameProblem.parse_map(args.map, args.n, precision=args.precision_bits or None,
                                             seed=cfg.seed) if args.map else \
            tame.TameProblem.identity(args.n, precision=args.precision_bits or None, seed=cfg.seed)
        sol = tame.build_tame_automorphism(problem)
        out = sol.to_json()
        if args.symplectic:
            out["symplectic_defect"] = ctx.nstr(tame.verify_symplectic_at_points(sol), 6)
        return out
    try:
        with open(args.solution, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read solution: {exc}", input=args.solution) from None
    sol = tame.TameSolution.from_json(data)
    rows = tame.verify_solution(sol)
    worst = max(r for row in rows for r in row["relative"])
    return {"verified": bool(worst < tame.RESIDUAL_TOL), "max_residual": ctx.nstr(worst, 6),
            "residuals": [{"source": r["source"], "target": r["target"],
                           "relative": [ctx.nstr(v, 6) for v in r["relative"]]} for r in rows]}


def selftest(seed: int = 0) -> dict:
    """A quick run of the core invariants."""
    rng = random.Random(seed)
    checks = {}
    mk = SurfaceParams.markov()
    params = SurfaceParams(*(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(4)),
                           Fraction(rng.choice([-3, -2, -1, 1, 2, 3])))

    def rand_poly():
        return parse_poly("+".join(f"({rng.randint(-3, 3)})*x^{rng.randint(0, 2)}*y^{rng.randint(0, 2)}"
                                   f"*z^{rng.randint(0, 1)}" for _ in range(3)))

    f, g, h = rand_poly(), rand_poly(), rand_poly()
    checks["casimir"] = poisson.casimir_check(f, params).is_zero()
    br = poisson.bracket
    jac = br(f, br(g, h, params), params) + br(g, br(h, f, params), params) + br(h, br(f, g, params), params)
    checks["jacobi"] = jac.is_zero()
    checks["bracket_xy_markov"] = br(parse_poly("x"), parse_poly("y"), mk).to_string() == "2*z^1-3*x^1*y^1"
    checks["lemma_identities"] = all(liegen.verify_lemma_identities(params, 2, 2, 1).values())
    checks["markov_list"] = [t.as_tuple() for t in markov.enumerate_ordered(30)] == \
        [(1, 1, 1), (1, 1, 2), (1, 2, 5), (1, 5, 13), (2, 5, 29)]
    checks["markov_brute_force"] = markov.enumerate_ordered(10**4) == markov.brute_force(10**4)
    checks["germ_relations"] = all(all(singular.model_fields(k).check_relations().values())
                                   for k in ("A1", "A3", "D4", "D5"))
    reps = singular.classify_surface(mk)
    checks["markov_singularity"] = [(r.point, r.ade_type) for r in reps] == [((0, 0, 0), "A1")]
    pt = SurfacePoint.make(mk, 1, 1, 1)
    a = flows.flow_axis(mk, "z", flows.flow_axis(mk, "z", pt, Fraction(1, 3)), Fraction(1, 4))
    b = flows.flow_axis(mk, "z", pt, Fraction(7, 12))
    checks["flow_group_law"] = max(abs(u - v) for u, v in zip(a.coords(), b.coords())) < ctx.ldexp(1, -(ctx.prec - 16))
    auto = flows.Automorphism((flows.axis_flow("x", Fraction(1, 5)), flows.axis_flow("z", Fraction(1, 7))))
    checks["symplectic"] = flows.check_symplectic(mk, auto, [ctx.mpf(1), 1, 1], ctx.mpf("1e-5")) < 1e-6
    return {"checks": checks, "passed": all(checks.values())}


def cmd_selftest(args, cfg):
    out = selftest(cfg.seed)
    return out, ("fail" if not out["passed"] else None)


# parser -----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="markovsymp",
                                description="Symplectic geometry of Markov-type cubic surfaces.")
    p.add_argument("--precision", type=int, default=None, help=f"working precision in bits (>= {MIN_PREC})")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None, help="numba thread count")
    p.add_argument("--config", default=None, help="key = value file (precision, seed, threads, output, params, A..E)")
    p.add_argument("--output", default=None, help="write JSON here instead of standard output")
    sub = p.add_subparsers(dest="command", required=True)

    def add_params(sp, surface=False):
        sp.add_argument("--params", default=None,
                        help='JSON object with keys among A, B, C, D, E (rationals as "p/q"); default Markov')
        if surface:
            sp.add_argument("--surface", choices=["markov"], default=None)

    sp = sub.add_parser("classify", help="singular points and their ADE types")
    add_params(sp, True)
    sp.add_argument("--method", choices=["resultant", "newton"], default="resultant")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("flow", help="apply an axis flow or a composition of shears")
    add_params(sp, True)
    sp.add_argument("--point", required=True, help='JSON [x, y, z]; entries numbers, "p/q" or [re, im]')
    sp.add_argument("--axis", choices=["x", "y", "z"])
    sp.add_argument("--time", help='rational "p/q" or JSON [re, im]')
    sp.add_argument("--auto", help='JSON array of shears, e.g. [{"axis": "x", "time_poly": "x^2"}]')
    sp.add_argument("--symplectic", action="store_true", help="also report the finite-difference defect")
    sp.add_argument("--h", default="1e-5")
    sp.add_argument("--orbit-csv", default=None, help="write iterates of the map as CSV")
    sp.add_argument("--orbit-samples", type=int, default=20)
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("bracket", help="Poisson bracket of two polynomials, in normal form")
    sp.add_argument("f")
    sp.add_argument("g")
    add_params(sp, True)
    sp.set_defaults(func=cmd_bracket)

    sp = sub.add_parser("certify", help="degree-capped Lie closure and generation certificates")
    add_params(sp, True)
    sp.add_argument("--max-gen-deg", type=int, default=6)
    sp.add_argument("--max-deg", type=int, default=6)
    sp.add_argument("--monomial", default=None)
    sp.add_argument("--shuffle-seed", type=int, default=None)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("markov", help="Markov triples")
    msub = sp.add_subparsers(dest="action", required=True)
    e = msub.add_parser("enumerate")
    e.add_argument("--bound", type=int, required=True)
    e = msub.add_parser("brute")
    e.add_argument("--bound", type=int, required=True)
    e = msub.add_parser("fit")
    e.add_argument("--count", type=int, required=True)
    e.add_argument("--window", type=int, nargs=2, default=None)
    e = msub.add_parser("lagrange")
    e.add_argument("--z", type=int, required=True)
    sp.set_defaults(func=cmd_markov)

    sp = sub.add_parser("tame", help="interpolate maps of Markov triples by automorphisms")
    tsub = sp.add_subparsers(dest="action", required=True)
    b = tsub.add_parser("build")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--map", default=None, help='"1:2,2:3,..."; unlisted sources are fixed')
    b.add_argument("--precision", dest="precision_bits", type=int, default=None)
    b.add_argument("--symplectic", action="store_true")
    v = tsub.add_parser("verify")
    v.add_argument("--solution", required=True)
    sp.set_defaults(func=cmd_tame)

    sp = sub.add_parser("selftest", help="run the quick invariant suite")
    sp.set_defaults(func=cmd_selftest)
    return p


def _config(args) -> RunConfig:
    data = read_config(args.config) if args.config else {}
    prec = args.precision if args.precision is not None else data.get("precision", DEFAULT_PREC)
    seed = args.seed if args.seed is not None else data.get("seed", 0)
    threads = args.threads if args.threads is not None else data.get("threads", 1)
    output = args.output if args.output is not None else data.get("output")
    return RunConfig(data.get("params"), prec, seed, threads, output, data.get("tolerances", {}))


def _set_threads(n: int) -> None:
    from . import _kernels

    if _kernels.HAVE_NUMBA and n > 1:
        import warnings

        import numba

        with warnings.catch_warnings():
            # numba complains about old TBB builds while picking a threading layer
            warnings.simplefilter("ignore")
            numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _emit(payload, mode, output) -> None:
    if mode == "lines":
        text = "".join(json.dumps(item, sort_keys=True) + "\n" for item in payload)
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        _set_threads(cfg.threads)
        with precision(cfg.precision):
            result = args.func(args, cfg)
            mode = None
            if isinstance(result, tuple):
                result, mode = result
            _emit(result, mode if mode == "lines" else None, cfg.output)
        return 1 if mode == "fail" else 0
    except MarkovSympError as exc:
        err = {"error": exc.to_json(), "input": argv}
        sys.stdout.write(json.dumps(err, sort_keys=True) + "\n")
        return 1
    except (ValueError, ZeroDivisionError) as exc:
        err = {"error": {"code": "invalid_input", "message": str(exc)}, "input": argv}
        sys.stdout.write(json.dumps(err, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

