"""Command-line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional

from . import fss, harness
from .models import Model, build_schedule, coupling_norm
from .models import _riffle_norm


def _sweep(args, force_observables=None) -> int:
    try:
        cfg = harness.SweepConfig.load(args.config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if force_observables:
        cfg.observables = force_observables
    if args.pstar_mode:
        cfg.pstar_mode = harness.PStarMode(args.pstar_mode)
    if args.riffle_all_pairs:
        cfg.riffle_all_pairs = True
    recs = harness.write_sweep(cfg, args.out, workers=args.workers)
    failed = [r for r in recs if r.error]
    print(f"wrote {len(recs) - len(failed)} grid points to {args.out}" + (f" ({len(failed)} failed)" if failed else ""))
    return 1 if failed else 0


def _collapse(args) -> int:
    model = Model.parse(args.model).value
    recs = [r for r in harness.read_records(args.inp) if r.model == model]
    if not recs:
        print(f"no rows for model {model} in {args.inp}", file=sys.stderr)
        return 2
    data = fss.ScalingDataset.from_records(recs, observable=args.observable)
    if args.min_size:
        keep = data.sizes >= args.min_size
        data = fss.ScalingDataset(data.sizes[keep], data.s[keep], data.y[keep], data.yerr[keep], data.label)
    init = (args.init_sc, args.init_nu) if args.init_sc is not None else None
    try:
        fit = fss.fit_collapse(
            data,
            init=init,
            fix_zeta=args.fix_zeta,
            n_bootstrap=args.bootstrap,
            seed=args.seed,
            window=args.window or None,
        )
    except fss.ConvergenceError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        fit = exc.best
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = fit.report(data)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _oracle(args) -> int:
    try:
        n_cmp, bad = harness.oracle_check(args.n, args.trials, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{n_cmp} region comparisons, {len(bad)} mismatches")
    for row in bad[:10]:
        print("  mismatch", row)
    return 1 if bad else 0


def _calibrate(args) -> int:
    model = Model.parse(args.model)
    if model is Model.RIFFLE:
        j, clipped = _riffle_norm(args.n, float(args.s), args.all_pairs)
        print(f"norm_J = {j:.17g}")
        print(f"clipped = {str(clipped).lower()}")
    else:
        print(f"norm_J = {coupling_norm(model, args.n, args.s):.17g}")
    return 0


def _schedule(args) -> int:
    sched = build_schedule(args.model, args.n, args.s, args.t, args.seed)
    text = sched.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scramblekit", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    for name, helptext in (("sweep", "ensemble sweep to CSV"), ("pstar", "P* and gate-count sweep (no simulation)")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", required=True)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--pstar-mode", choices=[m.value for m in harness.PStarMode])
        sp.add_argument("--riffle-all-pairs", action="store_true")

    sp = sub.add_parser("collapse", help="finite-size-scaling fit of a sweep CSV")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--fix-zeta", action="store_true", help="hold zeta at 0 instead of fitting it")
    sp.add_argument("--out")
    sp.add_argument("--observable", default="i3", choices=["i3", "pstar"])
    sp.add_argument("--bootstrap", type=int, default=fss.DEFAULT_BOOTSTRAP)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--min-size", type=int, default=0)
    sp.add_argument("--init-sc", type=float)
    sp.add_argument("--init-nu", type=float, default=2.0)
    sp.add_argument(
        "--window",
        type=float,
        default=fss.DEFAULT_WINDOW,
        help="fit only points within this distance in s of the starting s_c (0 = all points)",
    )

    sp = sub.add_parser("oracle-check", help="tableau vs state-vector entropies")
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("calibrate", help="print the normalization constant J")
    sp.add_argument("--model", default="riffle")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--all-pairs", action="store_true")

    sp = sub.add_parser("schedule", help="emit one circuit realization in text form")
    sp.add_argument("--model", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--t", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sweep":
        return _sweep(args)
    if args.command == "pstar":
        return _sweep(args, force_observables=("pstar", "gates"))
    if args.command == "collapse":
        return _collapse(args)
    if args.command == "oracle-check":
        return _oracle(args)
    if args.command == "calibrate":
        return _calibrate(args)
    return _schedule(args)


if __name__ == "__main__":
    raise SystemExit(main())
