"""Command line interface.

    ruinbounds table ID                   reproduce a published table as CSV
    ruinbounds bound KIND CONFIG [...]    evaluate one continuity bound
    ruinbounds eval QUANTITY CONFIG [...] evaluate model quantities as CSV

Exit codes: 0 success, 2 usage or config parse error, 3 mathematical
precondition violated, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from . import bounds as bounds_mod
from . import config as config_mod
from . import oracle, tables
from .classical import deficit_tail, ruin_probability
from .diffusion import PerturbedModel, k_iterates, k_tail, psi_total
from .errors import NumericalError, PreconditionError, TruncationError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL = 4


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{v:.7g}"


def _write_csv(rows, header, comments=()):
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _parse_u_values(spec: str):
    """Accept '1.5', '0,1,2' or 'start:stop:step'."""
    if ":" in spec:
        parts = [float(x) for x in spec.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise argparse.ArgumentTypeError("u range must be start:stop:step")
        start, stop, step = parts
        out = []
        u = start
        while u <= stop + 1e-12:
            out.append(round(u, 12))
            u += step
        return out
    return [float(x) for x in spec.split(",")]


def cmd_table(args) -> int:
    result = tables.run_table(args.id, getattr(args, "_config", None))
    rows = [(result.table_id, r.inputs, r.quantity, _fmt(r.computed),
             _fmt(r.paper), _fmt(r.deviation), r.flag, r.note)
            for r in result.rows]
    sys.stdout.write(_write_csv(
        rows, ("table", "inputs", "quantity", "computed", "paper",
               "abs_deviation", "flag", "note"),
        comments=result.comments))
    return EXIT_OK if result.all_match else EXIT_NUMERICAL


def cmd_bound(args) -> int:
    cfg = config_mod.load(args.config)
    if cfg.model2 is None:
        raise PreconditionError("bound evaluation needs a [model2] section")
    if args.kind == "dk1":
        rep = bounds_mod.dk1(cfg.model, cfg.model2, gamma=args.gamma)
    elif args.kind == "dk2":
        rep = bounds_mod.dk2(cfg.model, cfg.model2, y=args.y)
    else:
        if cfg.D is None or cfg.D2 is None:
            raise PreconditionError("dk3 needs D and D2 in [diffusion]")
        rep = bounds_mod.dk3(PerturbedModel(cfg.model, cfg.D),
                             PerturbedModel(cfg.model2, cfg.D2))
    names = sorted(rep.components)
    header = ["kind", "value", "contraction_modulus"] + names
    row = [rep.kind, _fmt(rep.value), _fmt(rep.contraction_modulus)] + \
        [_fmt(rep.components[k]) for k in names]
    sys.stdout.write(_write_csv([row], header,
                                comments=rep.convention_notes))
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = config_mod.load(args.config)
    num = cfg.numeric
    us = _parse_u_values(args.u)
    need_d = args.quantity in ("ktail", "psit", "iterate")
    if need_d and cfg.D is None:
        raise PreconditionError(f"{args.quantity} needs D in [diffusion]")
    rows = []
    if args.quantity == "ruin":
        g = ruin_probability(cfg.model, h=num.h, u_max=num.umax)
        rows = [(_fmt(u), _fmt(g(u))) for u in us]
    elif args.quantity == "deficit":
        g = deficit_tail(cfg.model, args.y, h=num.h, u_max=num.umax)
        rows = [(_fmt(u), _fmt(g(u))) for u in us]
    elif args.quantity == "ktail":
        g = k_tail(PerturbedModel(cfg.model, cfg.D), h=num.h, u_max=num.umax)
        rows = [(_fmt(u), _fmt(g(u))) for u in us]
    elif args.quantity == "psit":
        g = psi_total(PerturbedModel(cfg.model, cfg.D), h=num.h,
                      u_max=num.umax)
        rows = [(_fmt(u), _fmt(g(u))) for u in us]
    elif args.quantity == "iterate":
        res = k_iterates(PerturbedModel(cfg.model, cfg.D), args.k0, args.n,
                         h=num.h, u_max=num.umax)
        g = res.trace.iterates[-1]
        rows = [(_fmt(u), _fmt(g(u))) for u in us]
    else:  # mc
        seed = args.seed if args.seed is not None else num.seed
        model = cfg.model
        if args.mc_quantity in ("psi_t", "k_tail"):
            if cfg.D is None:
                raise PreconditionError("perturbed quantities need D")
            model = PerturbedModel(cfg.model, cfg.D)
        out = [oracle.estimate(model, args.mc_quantity, u, args.samples,
                               seed, y=args.y) for u in us]
        rows = [(_fmt(u), _fmt(e.estimate), _fmt(e.standard_error))
                for u, e in zip(us, out)]
        sys.stdout.write(_write_csv(rows, ("u", "value", "se")))
        return EXIT_OK
    sys.stdout.write(_write_csv(rows, ("u", "value")))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ruinbounds",
        description="Ruin probabilities and continuity bounds for the "
                    "classical risk model, with published-table reproduction.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="reproduce a published table as CSV")
    t.add_argument("id", choices=tables.TABLE_IDS)
    t.set_defaults(func=cmd_table)

    b = sub.add_parser("bound", help="evaluate a continuity bound")
    b.add_argument("kind", choices=("dk1", "dk2", "dk3"))
    b.add_argument("config", help="path to a config file with two models")
    b.add_argument("--gamma", type=float, default=0.0)
    b.add_argument("--y", type=float, default=0.0)
    b.set_defaults(func=cmd_bound)

    e = sub.add_parser("eval", help="evaluate model quantities")
    e.add_argument("quantity",
                   choices=("ruin", "deficit", "ktail", "psit", "iterate",
                            "mc"))
    e.add_argument("config")
    e.add_argument("--u", default="0", help="point, comma list or start:stop:step")
    e.add_argument("--y", type=float, default=0.0)
    e.add_argument("--n", type=int, default=5, help="iteration count")
    e.add_argument("--k0", type=float, default=0.0, help="starting constant")
    e.add_argument("--samples", type=int, default=100_000)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--quantity", dest="mc_quantity", default="psi",
                   choices=("psi", "psi_t", "k_tail", "deficit"),
                   help="quantity for mc estimation")
    e.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except config_mod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (NumericalError, TruncationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
