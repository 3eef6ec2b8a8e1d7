"""Command line front end.

Models are JSON files or builtin references like
``builtin:pointer_discrete?n=4``.  Subcommands: validate (structural
checks), lemmas (averaging identities on random probes), analyze (the
full pipeline), witness (just the separating state pairs), list (the
builtin catalog).
"""

from __future__ import annotations

import argparse
import os
import sys

from ._version import __version__
from .catalog import CATALOG, build_world
from .errors import TwirlabError
from .model import parse_builtin_ref, parse_model
from .pipeline import Options, render_text, run_analysis
from .symmetry import verify_twirl_laws

_GREEN = "\x1b[32m"
_RED = "\x1b[31m"
_DIM = "\x1b[2m"
_RESET = "\x1b[0m"


def _use_color(stream) -> bool:
    if os.environ.get("TWIRLAB_NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, stream=None) -> str:
    stream = stream or sys.stdout
    if not _use_color(stream):
        return text
    out = text.replace("[pass]", f"[{_GREEN}pass{_RESET}]")
    out = out.replace("[FAIL]", f"[{_RED}FAIL{_RESET}]")
    return out.replace("[skip]", f"[{_DIM}skip{_RESET}]")


def _load(ref: str):
    """Resolve a model reference to (bundle, file options, digest)."""
    if ref.startswith("builtin:"):
        name, params = parse_builtin_ref(ref)
        return build_world(name, params), {}, None
    mf = parse_model(ref)
    return mf.bundle, mf.options, mf.digest


def _options(args, file_opts: dict) -> Options:
    opt = Options()
    for k, v in file_opts.items():
        setattr(opt, k, v)
    if getattr(args, "tol", None) is not None:
        opt.tol = args.tol
    if getattr(args, "rank_tol", None) is not None:
        opt.rank_tol = args.rank_tol
    if getattr(args, "seed", None) is not None:
        opt.seed = args.seed
    if getattr(args, "trials", None) is not None:
        opt.trials = args.trials
    return opt


def _cmd_list(args) -> int:
    width = max(len(n) for n in CATALOG)
    for name in sorted(CATALOG):
        desc, defaults = CATALOG[name]
        dtxt = ""
        if defaults:
            dtxt = "  [" + ", ".join(f"{k}={v}" for k, v in sorted(defaults.items())) + "]"
        print(f"{name:<{width}}  {desc}{dtxt}")
    return 0


def _cmd_validate(args) -> int:
    from .core import check_steering_closure, validate_system

    bundle, file_opts, _ = _load(args.model)
    opt = _options(args, file_opts)
    ok = True
    for part in bundle.parts:
        rep = validate_system(part, opt.tol)
        ok &= rep.passed
        print(_paint(f"[{'pass' if rep.passed else 'FAIL'}] system {part.id}: "
                     f"worst residual {rep.worst():.2e}"))
        for c in rep.checks:
            if not c.passed:
                print(_paint(f"  [FAIL] {c.name}: residual {c.residual:.2e}"
                             + (f" ({c.detail})" if c.detail else "")))
    if bundle.bipartite:
        rep = validate_system(bundle.composite, opt.tol)
        ok &= rep.passed
        print(_paint(f"[{'pass' if rep.passed else 'FAIL'}] composite "
                     f"{bundle.composite.id}: worst residual {rep.worst():.2e}"))
        steer = check_steering_closure(bundle.composite, opt.tol)
        ok &= steer.passed
        print(_paint(f"[{'pass' if steer.passed else 'FAIL'}] steering closure: "
                     f"{steer.n_state_checks} marginal and {steer.n_effect_checks} "
                     f"steered-effect checks"))
    return 0 if ok else 1


def _cmd_lemmas(args) -> int:
    bundle, file_opts, _ = _load(args.model)
    opt = _options(args, file_opts)
    rep = verify_twirl_laws(list(bundle.part_actions), trials=opt.trials,
                            seed=opt.seed, tol=opt.tol)
    rows = [("absorption from the left", rep.left_invariance),
            ("absorption from the right", rep.right_invariance),
            ("idempotence", rep.idempotence)]
    rows += sorted(rep.consistency.items())
    ok = True
    for name, res in rows:
        good = res <= opt.tol
        ok &= good
        print(_paint(f"[{'pass' if good else 'FAIL'}] {name.replace('_', ' ')}: "
                     f"max residual {res:.2e} over {rep.trials} probes"))
    return 0 if ok else 1


def _cmd_analyze(args) -> int:
    bundle, file_opts, digest = _load(args.model)
    opt = _options(args, file_opts)
    report = run_analysis(bundle, opt, model_digest=digest)
    payload = report.to_bytes()
    if args.report:
        with open(args.report, "wb") as fh:
            fh.write(payload)
        print(f"report written to {args.report}", file=sys.stderr)
    if args.format == "json":
        sys.stdout.write(payload.decode("ascii"))
    else:
        print(_paint(render_text(report.data)))
    return 0


def _cmd_witness(args) -> int:
    bundle, file_opts, digest = _load(args.model)
    if not bundle.bipartite:
        print("witness construction needs a bipartite world", file=sys.stderr)
        return 2
    opt = _options(args, file_opts)
    report = run_analysis(bundle, opt, model_digest=digest)
    data = report.data
    loc = data.get("locality", {})
    w = loc.get("witness")
    if w:
        print("locality witness: invariant joint states with identical product "
              "statistics")
        print(f"  state 1: {w['state_1']}")
        print(f"  state 2: {w['state_2']}")
        print(f"  agreement on products of invariant local effects: "
              f"{w['product_effect_discrepancy']:.2e}")
        print(f"  separating invariant effect index {w['separating_index']}, "
              f"gap {w['separating_gap']:.6g}")
    else:
        print("no locality witness: the twirled world is locally tomographic")
    ub = data.get("ubiquity", {})
    if ub and not ub.get("trivial_action"):
        print("correlated/product invariant pair:")
        print(f"  product state:    {ub['product_state']}")
        print(f"  correlated state: {ub['correlated_state']}")
        print(f"  separation {ub['separation']:.6g}, local statistics agree to "
              f"{ub['local_indistinguishability']:.2e}")
        if ub.get("separated"):
            print(f"  separable by invariant effect {ub['separating_index']} "
                  f"(gap {ub['separating_gap']:.6g})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="twirlab",
        description="symmetry-averaged worlds: construction, verification, "
                    "and locality analysis")
    ap.add_argument("--version", action="version", version=f"twirlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_model(p):
        p.add_argument("model", help="model file path or builtin:name?k=v")
        p.add_argument("--tol", type=float, default=None,
                       help="verification tolerance (default 1e-9)")
        p.add_argument("--rank-tol", dest="rank_tol", type=float, default=None,
                       help="relative singular-value cutoff (default 1e-8)")
        p.add_argument("--seed", type=int, default=None,
                       help="probe RNG seed (default 42)")

    p = sub.add_parser("validate", help="structural checks on the base world")
    add_model(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("lemmas", help="averaging identities on random probes")
    add_model(p)
    p.add_argument("--trials", type=int, default=None,
                   help="number of probe vectors (default 200)")
    p.set_defaults(func=_cmd_lemmas)

    p = sub.add_parser("analyze", help="full verification and locality analysis")
    add_model(p)
    p.add_argument("--report", metavar="PATH", default=None,
                   help="also write the canonical JSON report to PATH")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="stdout format (default text)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("witness", help="print the separating state pairs")
    add_model(p)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("list", help="available builtin worlds")
    p.set_defaults(func=_cmd_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TwirlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
