"""Command line entry point: ``hsrm-id {run,batch,gen}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigLoadError, RunConfig, load_config, template_config
from .harness import BatchError, dumps, run_batch, write_outputs

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("hsrm_id")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    update = {}
    if args.seed is not None:
        update["seeds"] = [args.seed]
    if args.baseline is not None:
        update["baseline"] = args.baseline
    if args.out is not None or args.trace:
        update["output"] = cfg.output.model_copy(update={
            "dir": args.out if args.out is not None else cfg.output.dir,
            "trace": args.trace or cfg.output.trace,
        })
    workers = getattr(args, "workers", None)
    if workers is not None:
        if workers < 1:
            raise ValueError("workers: must be >= 1")
        update["workers"] = workers
    return cfg.model_copy(update=update)


def _emit(doc: dict, out_dir: str | None, name: str) -> None:
    if out_dir is None:
        sys.stdout.write(dumps(doc))
        for seed, text in sorted(doc.get("_traces", {}).items()):
            log.info("trace for seed %s not written: no --out directory", seed)
        return
    for p in write_outputs(doc, out_dir, name):
        log.info("wrote %s", p)


def cmd_gen(args) -> int:
    text = json.dumps(template_config(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_run(args, batch: bool) -> int:
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except (ConfigLoadError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if not batch:
        cfg = cfg.model_copy(update={"seeds": cfg.seeds[:1]})
    try:
        doc = run_batch(cfg)
        _emit(doc, cfg.output.dir, "batch_report.json" if batch else "run_report.json")
    except (BatchError, OSError) as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hsrm-id", description="Sensitive-robot intrusion detection simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit a template config")
    gen.add_argument("--out", help="write the template here instead of stdout")

    for name, help_ in (("run", "run the first (or --seed) seed of a config"),
                        ("batch", "sweep every seed of a config")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON run config")
        p.add_argument("--seed", type=int, help="override the seed list with a single seed")
        p.add_argument("--out", help="output directory for the report and traces")
        p.add_argument("--trace", action="store_true", help="write per-iteration CSV traces")
        p.add_argument("--baseline", choices=["none", "random_patrol", "plain_acs"])
        if name == "batch":
            p.add_argument("--workers", type=int, help="parallel worker processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "gen":
        return cmd_gen(args)
    return cmd_run(args, batch=args.command == "batch")


if __name__ == "__main__":
    sys.exit(main())
