"""``ergolab`` command line.

Exit codes: 0 success, 1 replay mismatch, 2 config/schema error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .bernoulli import BudgetError
from .harness import ConfigError, load_config, replay_check, run

# subcommand -> config kind
SUBCOMMANDS = {
    "sweep": "sweep",
    "percolate": "interval-probe",
    "spectrum": "spectral",
    "entropy": "entropy-ledger",
    "coinduce": "coinduce",
    "extend": "extension-suite",
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ergolab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"ergolab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, kind in [*SUBCOMMANDS.items(), ("run", None)]:
        sp = sub.add_parser(name, help=f"run a {kind} config" if kind else "run a config of any kind")
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", help="output directory (overrides outputDir)")
        sp.add_argument("--threads", type=int, help="worker processes (default $ERGOLAB_THREADS or 1)")
        sp.add_argument("--seed-offset", type=int, default=0, help="added to every seed")
        sp.set_defaults(kind=kind)
    rp = sub.add_parser("replay", help="check the digests of a finished run")
    rp.add_argument("--out", required=True, help="output directory holding manifest.json")
    rp.add_argument("--rerun", action="store_true", help="also re-execute the config and compare")
    return ap


def _print_summary(kind: str, res) -> None:
    if kind == "entropy-ledger":
        print(res.result.table())
    elif kind == "sweep":
        pc = res.result.pc_hat
        print(f"pc_hat = {'none' if pc is None else format(pc, '.12g')}")
    elif kind == "interval-probe":
        for s in res.result:
            print(f"p={s['p']:.6g} in_interval={s['inInterval']} mean_big={s['meanBigClusters']:.6g} "
                  f"many={s['fractionWithMany']:.3g} none={s['fractionWithNone']:.3g}")
    print(f"wrote {len(res.manifest.files)} files + manifest.json to {res.out}")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "replay":
        rep = replay_check(args.out, rerun=args.rerun)
        if rep:
            print("replay: pass")
            return 0
        for name, why in rep.mismatches:
            print(f"replay: {why}: {name}", file=sys.stderr)
        return 1
    try:
        cfg = load_config(args.config)
        if args.kind is not None and cfg["kind"] != args.kind:
            raise ConfigError("$.kind", f"{cfg['kind']!r} does not match subcommand {args.command!r} "
                                        f"(expects {args.kind!r})")
        res = run(cfg, args.out, args.threads, args.seed_offset)
    except ConfigError as exc:
        print(f"config error at {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    _print_summary(cfg["kind"], res)
    return 0


if __name__ == "__main__":
    sys.exit(main())
