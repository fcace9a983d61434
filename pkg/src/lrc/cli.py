"""Command-line entry point: ``lrc generate|run|fig1|fig2|bounds``.

Exit status: 0 on success, 1 for configuration errors, 2 for runtime errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .core import ConceptError, format_real
from .datagen import (
    ClusterConfig,
    clustered_meta,
    generate_clustered,
    generate_identity,
    generate_random,
    generate_tight_bound,
    write_dataset,
)
from .harness import (
    FIG1_COLUMNS,
    FIG2_COLUMNS,
    ConfigError,
    ExperimentConfig,
    load_config,
    rows_csv,
    run_experiment,
    sweep_figure1,
    sweep_figure2,
    trials_csv,
    write_text,
)
from .instrumentation import bounds

log = logging.getLogger("lrc")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _overrides(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _config(args) -> ExperimentConfig:
    over = _overrides(args.set)
    if args.seed is not None:
        over["seed"] = str(args.seed)
    if args.config:
        return load_config(args.config, over)
    return ExperimentConfig.from_mapping(over)


def _emit(args, csv_text: str, json_obj) -> None:
    if args.format == "json":
        write_text(args.out, json.dumps(json_obj, indent=2) + "\n")
    else:
        write_text(args.out, csv_text)


def cmd_generate(args) -> int:
    if args.dataset == "clustered":
        inst = generate_clustered(
            ClusterConfig(args.columns, args.rows, args.clusters, args.max_flips, args.alphabet, args.seed or 0)
        )
        h, meta = inst.matrix, clustered_meta(inst)
    elif args.dataset == "random":
        h = generate_random(args.rows, args.columns, args.alphabet, args.seed or 0)
        meta = {"generator": "random", "alphabet": args.alphabet, "seed": args.seed or 0}
    elif args.dataset == "identity":
        h, meta = generate_identity(args.rows), {"generator": "identity"}
    else:
        t = generate_tight_bound(args.tight_n)
        h = t.matrix
        meta = {"generator": "tight", "n": args.tight_n, "h_hat": t.h_hat, "h_star": t.h_star}
    side = write_dataset(args.out, h, meta)
    print(f"wrote {h.n}x{h.m} matrix to {args.out} (metadata {side})", file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    res = run_experiment(cfg)
    out = args.out or cfg.out or None
    if args.format == "json":
        write_text(out, res.to_json() + "\n")
    else:
        write_text(out, trials_csv(res))
    s = res.summary
    print(f"{cfg.algorithm}: mean={s['mean']:.4f} std={s['std']:.4f} max={s['max']:.0f} over {s['trials']} trials", file=sys.stderr)
    return EXIT_OK


def cmd_fig1(args) -> int:
    cfg = _config(args)
    rows = sweep_figure1(cfg)
    _emit(args, rows_csv(FIG1_COLUMNS, rows), {"config": cfg.as_dict(), "rows": rows})
    return EXIT_OK


def cmd_fig2(args) -> int:
    cfg = _config(args)
    rows = sweep_figure2(cfg)
    _emit(args, rows_csv(FIG2_COLUMNS, rows), {"config": cfg.as_dict(), "rows": rows})
    return EXIT_OK


def cmd_bounds(args) -> int:
    b = bounds(args.hsize, args.eps, args.delta).as_dict()
    lines = ["name,value"] + [f"{k},{'' if v is None else format_real(v) if isinstance(v, float) else v}" for k, v in b.items()]
    _emit(args, "\n".join(lines) + "\n", b)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lrc", description="Learning from random counter-examples: simulations and bounds.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="flat key = value experiment file")
            p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    g = sub.add_parser("generate", help="write a dataset as a CSV grid plus metadata")
    g.add_argument("--dataset", choices=("random", "clustered", "identity", "tight"), default="clustered")
    g.add_argument("--rows", type=int, default=1000)
    g.add_argument("--columns", type=int, default=500)
    g.add_argument("--clusters", type=int, default=10)
    g.add_argument("--max-flips", type=int, default=20)
    g.add_argument("--alphabet", type=int, default=2)
    g.add_argument("--tight-n", type=int, default=2)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    for name, func, text in (
        ("run", cmd_run, "run one experiment config"),
        ("fig1", cmd_fig1, "sweep |H|: mean counter-examples vs. bounds"),
        ("fig2", cmd_fig2, "sweep epsilon: arbitrary learner vs. PAC sample bound"),
    ):
        p = sub.add_parser(name, help=text)
        common(p)
        p.set_defaults(func=func)

    b = sub.add_parser("bounds", help="print the bound table")
    b.add_argument("--hsize", type=int, required=True)
    b.add_argument("--eps", type=float)
    b.add_argument("--delta", type=float)
    common(b, config=False)
    b.set_defaults(func=cmd_bounds)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ConceptError, FileNotFoundError) as exc:
        print(f"lrc: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"lrc: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
