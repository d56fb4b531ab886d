"""Command-line interface: run, replay, rescore, analyze, serve.

Exit codes: 0 success, 2 configuration error, 3 log integrity error,
4 cohort ingestion error, 1 anything else. The HSISIM_LOG_DIR environment
variable supplies the default log directory for `run` and `analyze`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .cohort import (IngestError, build_cohort, experiment_reports,
                     render_text, write_cohort_csv, write_tests_csv)
from .config import SessionConfig, config_from_dict, load_config
from .sagat import ConfigError, ScoringConfig
from .session import replay, rescore, run_session
from .sessionlog import IntegrityError

EXIT_CONFIG = 2
EXIT_INTEGRITY = 3
EXIT_INGEST = 4


def _log_dir() -> str:
    return os.environ.get("HSISIM_LOG_DIR", ".")


def _default_log_path(config: SessionConfig) -> str:
    name = (f"{config.participant_id}_{config.hazard_kind}"
            f"_{config.attempt}_{config.seed}.jsonl")
    return os.path.join(_log_dir(), name)


def cmd_run(args) -> int:
    config = load_config(args.config) if args.config else SessionConfig()
    if args.seed is not None:
        data = config.to_dict()
        data["seed"] = args.seed
        config = config_from_dict(data)
    out = args.out or _default_log_path(config)
    if args.operator == "gateway":
        from .gateway import serve_forever
        host, _, port = args.listen.rpartition(":")
        serve_forever(config, host or "127.0.0.1", int(port), out_path=out)
        return 0
    result = run_session(config, out_path=out)
    print(f"log written to {out}")
    print(json.dumps(result.report, indent=2, sort_keys=True))
    return 0


def cmd_replay(args) -> int:
    result = replay(args.log)
    status = "incomplete" if result.incomplete else "ok"
    print(f"replay {status}: {result.ticks_replayed} ticks, "
          f"final state hash {result.final_hash}")
    return 0


def cmd_rescore(args) -> int:
    scoring = None
    naq_mode = None
    if args.scoring:
        with open(args.scoring, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        naq_mode = data.pop("naq_mode", None)
        scoring = ScoringConfig(**data) if data else None
    report = rescore(args.log, scoring=scoring, naq_mode=naq_mode)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_analyze(args) -> int:
    cohort = build_cohort(args.logs or _log_dir())
    doc = experiment_reports(cohort, correction=args.correction,
                             spearman_method=args.spearman_method)
    text = render_text(doc)
    base, _ = os.path.splitext(args.out)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    write_cohort_csv(cohort, base + ".cohort.csv")
    write_tests_csv(doc, base + ".wilcoxon.csv", base + ".spearman.csv")
    print(text)
    print(f"written: {args.out}, {base}.cohort.csv, "
          f"{base}.wilcoxon.csv, {base}.spearman.csv")
    return 0


def cmd_serve(args) -> int:
    from .gateway import serve_forever
    config = load_config(args.config) if args.config else SessionConfig()
    host, _, port = args.listen.rpartition(":")
    serve_forever(config, host or "127.0.0.1", int(port),
                  out_path=args.out, realtime=not args.fast)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hsisim")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one session (scripted operator or live gateway)")
    p.add_argument("--config", help="session config JSON (defaults used if omitted)")
    p.add_argument("--operator", default="policy", choices=["policy", "gateway"])
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="log path (default derived from config)")
    p.add_argument("--listen", default="127.0.0.1:8765",
                   help="gateway listen address (operator=gateway only)")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("replay", help="verify a session log by re-execution")
    p.add_argument("--log", required=True)
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("rescore", help="recompute a report under another rubric")
    p.add_argument("--log", required=True)
    p.add_argument("--scoring", help="JSON with cmq_rubric/idk_mode/naq_mode")
    p.set_defaults(fn=cmd_rescore)

    p = sub.add_parser("analyze", help="batch statistics over a log directory")
    p.add_argument("--logs", help="directory of .jsonl logs (or HSISIM_LOG_DIR)")
    p.add_argument("--out", default="report.txt")
    p.add_argument("--correction", default="none",
                   choices=["none", "bonferroni"])
    p.add_argument("--spearman-method", default="permutation",
                   choices=["permutation", "t-approx"])
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("serve", help="serve one session to a live console")
    p.add_argument("--config")
    p.add_argument("--listen", default="127.0.0.1:8765")
    p.add_argument("--out", help="log path for the served session")
    p.add_argument("--fast", action="store_true",
                   help="run unpaced instead of real time")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except IngestError as exc:
        print(f"ingestion error: {exc}", file=sys.stderr)
        return EXIT_INGEST


if __name__ == "__main__":
    sys.exit(main())
