"""Command-line front end: ``pnfgame <command> [options]``.

Exit codes: 0 success, 1 ``verify`` found no strict equilibrium, 2 bad
configuration or input, 3 solver failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND
from .equilibrium import gamma_region_table, production_fixed_point, verify_strict_nash
from .errors import ConfigError, InvalidProfileError, PNFError, SolverError
from .io import read_json, render_json, render_rows, write_manifest, write_text
from .model import BenefitSpec, GameConfig, StrategyProfile
from .search import SCALING_FIELDS, influencer_scaling, search_equilibrium
from .topology import ORIENTATION
from .welfare import social_optimum

EXIT_OK = 0
EXIT_NOT_EQUILIBRIUM = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_USAGE = 64

DEFAULTS = {"n": 10, "rho": 0.8, "c": 0.1, "gamma": 0.5, "benefit": "log1p"}

GAMMA_FIELDS = ("d", "x_s", "X_s", "gamma_lo", "gamma_hi")
PRICING_FIELDS = ("gamma", "d_opt", "x_opt", "welfare_per_user", "p_opt", "p_paper", "t_lo", "t_hi", "t_mid")
SEARCH_FIELDS = ("seed", "found", "classification", "n_h", "x_hi", "x_lo", "k_hi", "k_lo", "sweeps")
WITNESS_FIELDS = ("user", "kind", "reason", "new_x", "new_outbound", "utility_gain")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _grid(text: str) -> list:
    """``lo:hi:num`` inclusive linear grid."""
    try:
        lo, hi, num = text.split(":")
        return [float(v) for v in np.linspace(float(lo), float(hi), int(num))]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:num, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file; explicit flags override its fields")
    common.add_argument("--n", type=int, help="population size")
    common.add_argument("--rho", type=float, help="diversity parameter in (0, 1)")
    common.add_argument("--c", type=float, help="marginal production cost")
    common.add_argument("--gamma", type=float, help="cost per outbound subscription")
    common.add_argument("--benefit", help="benefit function, log1p[:scale]")
    common.add_argument("--appendix-exponent", action="store_true", default=None,
                        help="use the (1+d)^(1-rho) symmetric multiplier")
    common.add_argument("--out", help="output file (default: stdout, no manifest)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")

    parser = _Parser(prog="pnfgame", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pnfgame {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("gamma-regions", parents=[common], help="link-cost intervals of symmetric equilibria")

    p = sub.add_parser("verify", parents=[common], help="check a profile for strict equilibrium")
    p.add_argument("--profile", required=True,
                   help='profile JSON {"x": [...], "g": [[...]]}; omit "x" to use fixed-point productions')

    p = sub.add_parser("search", parents=[common], help="Monte-Carlo equilibrium search")
    p.add_argument("--seeds", type=int, default=10, help="number of seeds")
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--max-sweeps", type=int, default=200)

    sub.add_parser("optimum", parents=[common], help="social optimum and prices")

    p = sub.add_parser("pricing-sweep", parents=[common], help="optimum and prices over a gamma grid")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma-list", type=_float_list, help="comma-separated gamma values")
    g.add_argument("--gamma-grid", type=_grid, help="lo:hi:num inclusive grid")

    p = sub.add_parser("scaling", parents=[common], help="influencer fraction versus population size")
    p.add_argument("--n-list", type=_int_list, required=True, help="comma-separated population sizes")
    p.add_argument("--seeds", type=int, default=10, help="seeds per population size")
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--max-sweeps", type=int, default=200)
    return parser


def load_config(args, n_override=None) -> GameConfig:
    data = dict(DEFAULTS)
    if args.config:
        data.update(read_json(args.config))
    for key in ("n", "rho", "c", "gamma", "benefit"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if n_override is not None:
        if args.n is not None and args.n != n_override:
            raise ConfigError(f"--n {args.n} disagrees with the profile's {n_override} users")
        data["n"] = n_override
    if isinstance(data["benefit"], str):
        data["benefit"] = BenefitSpec.parse(data["benefit"]).to_dict()
    if args.appendix_exponent is not None:
        data["appendix_exponent"] = args.appendix_exponent
    return GameConfig.from_dict(data)


def _manifest(command, argv, config, seeds=None, summary=None) -> dict:
    return {
        "command": command,
        "argv": list(argv),
        "config": config.to_dict(),
        "seeds": seeds,
        "version": __version__,
        "backend": BACKEND,
        "conventions": {
            "symmetric_exponent": "(1+d)^(1-rho)" if config.appendix_exponent else "(1+d)^((1-rho)/rho)",
            "priced_utility": "subscriber pays gamma+t per outbound link and p per unit from each friend; "
                              "producer earns t per inbound subscription and p*x_i per friend",
            "link_cost": "outbound subscriptions only",
            "topology_orientation": ORIENTATION,
        },
        "summary": summary or {},
    }


def _emit(args, argv, config, text, seeds=None, summary=None):
    if args.out:
        write_text(args.out, text)
        write_manifest(args.out, _manifest(args.command, argv, config, seeds, summary))
    else:
        sys.stdout.write(text)


def _cmd_gamma_regions(args, argv):
    config = load_config(args)
    table = gamma_region_table(config)
    rows = [dict(d=iv.d, x_s=iv.x_s, X_s=iv.X_s, gamma_lo=iv.gamma_lo, gamma_hi=iv.gamma_hi) for iv in table.intervals]
    text = render_rows(GAMMA_FIELDS, rows, args.format or "csv")
    _emit(args, argv, config, text, summary={"mean_width": table.mean_width})
    return EXIT_OK


def _load_profile(path):
    data = read_json(path)
    if not isinstance(data, dict) or "g" not in data:
        raise InvalidProfileError(f"{path}: profile JSON needs a 'g' matrix")
    g = np.asarray(data["g"])
    if g.ndim != 2:
        raise InvalidProfileError(f"{path}: 'g' must be a square matrix")
    return data.get("x"), g


def _cmd_verify(args, argv):
    x, g = _load_profile(args.profile)
    config = load_config(args, n_override=g.shape[0])
    if x is None:
        x = production_fixed_point(g, config)
    report = verify_strict_nash(StrategyProfile(x, g), config)
    if (args.format or "json") == "json":
        text = render_json(report.to_dict())
    else:
        rows = [w.to_dict() for w in report.witnesses]
        for r in rows:
            r["new_outbound"] = " ".join(str(j) for j in r["new_outbound"])
        text = render_rows(WITNESS_FIELDS, rows, "csv")
    failed = [c.name for c in report.failed_checks()]
    _emit(args, argv, config, text, summary={"verdict": report.verdict, "failed_checks": failed})
    return EXIT_OK if report.is_equilibrium else EXIT_NOT_EQUILIBRIUM


def _cmd_search(args, argv):
    config = load_config(args)
    seeds = list(range(args.seed_start, args.seed_start + args.seeds))
    records, rows = [], []
    for seed in seeds:
        res = search_equilibrium(config, seed, args.max_sweeps)
        row = dict.fromkeys(SEARCH_FIELDS)
        row.update(seed=seed, found=res is not None)
        rec = {"seed": seed, "found": res is not None}
        if res is not None:
            rep = res.report
            row.update(classification=rep.classification, n_h=rep.n_h, x_hi=rep.x_hi, x_lo=rep.x_lo,
                       k_hi=rep.k_hi, k_lo=rep.k_lo, sweeps=res.sweeps)
            rec.update(sweeps=res.sweeps, report=rep.to_dict(), profile=res.profile.to_dict())
        rows.append(row)
        records.append(rec)
    if (args.format or "csv") == "json":
        text = render_json(records)
    else:
        text = render_rows(SEARCH_FIELDS, rows, "csv")
    found = [r for r in rows if r["found"]]
    summary = {
        "found": len(found),
        "asymmetric": sum(1 for r in found if r["classification"] == "asymmetric"),
        "symmetric": sum(1 for r in found if r["classification"] == "symmetric"),
    }
    _emit(args, argv, config, text, seeds=seeds, summary=summary)
    return EXIT_OK


def _optimum_row(config):
    opt = social_optimum(config)
    row = {"gamma": config.gamma}
    row.update({k: v for k, v in opt.to_dict().items() if k in PRICING_FIELDS})
    return row


def _cmd_optimum(args, argv):
    config = load_config(args)
    row = _optimum_row(config)
    opt = social_optimum(config)
    text = render_rows(PRICING_FIELDS, [row], args.format or "csv")
    _emit(args, argv, config, text, summary={"foc_residual": opt.foc_residual, "boundary": opt.boundary})
    return EXIT_OK


def _cmd_pricing_sweep(args, argv):
    config = load_config(args)
    gammas = args.gamma_list if args.gamma_list is not None else args.gamma_grid
    rows = [_optimum_row(config.replace(gamma=gm)) for gm in gammas]
    text = render_rows(PRICING_FIELDS, rows, args.format or "csv")
    _emit(args, argv, config, text, summary={"gammas": gammas})
    return EXIT_OK


def _cmd_scaling(args, argv):
    config = load_config(args)
    rows, _, summary = influencer_scaling(config, args.n_list, args.seeds, args.seed_start, args.max_sweeps)
    text = render_rows(SCALING_FIELDS, rows, args.format or "csv")
    seeds = list(range(args.seed_start, args.seed_start + args.seeds))
    _emit(args, argv, config, text, seeds=seeds, summary={str(n): s for n, s in summary.items()})
    return EXIT_OK


COMMANDS = {
    "gamma-regions": _cmd_gamma_regions,
    "verify": _cmd_verify,
    "search": _cmd_search,
    "optimum": _cmd_optimum,
    "pricing-sweep": _cmd_pricing_sweep,
    "scaling": _cmd_scaling,
}


def execute(argv) -> int:
    argv = list(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, argv)
    except (ConfigError, InvalidProfileError, OSError, json.JSONDecodeError) as exc:
        print(f"pnfgame: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"pnfgame: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except PNFError as exc:
        print(f"pnfgame: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main(argv=None) -> int:
    code = execute(sys.argv[1:] if argv is None else argv)
    sys.exit(code)


if __name__ == "__main__":
    main()
