"""Command-line entry point.

Verbs: ingest, build-networks, correlate, detect, reactions, topics, sweep,
bench, export-ui, agreement.  Exit codes: 0 success, 1 usage error, 2 data
error.  COATTENTION_CORPUS / COATTENTION_WORK override the path flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .config import PipelineConfig
from .labels import agreement_summary, load_label_file
from .pipeline import MissingArtifactError, Pipeline, run_benchmark
from .redirects import RedirectError
from .synth import SynthConfig

log = logging.getLogger("coattention")

_VERB_TO_STAGE = {
    "ingest": "ingest",
    "build-networks": "networks",
    "correlate": "correlate",
    "detect": "detect",
    "reactions": "reactions",
    "topics": "topics",
    "export-ui": "export",
}

_SWEEP_DEFAULTS = {
    "temporal": (1e-3, 10.0),
    "structural": (1.23e-4, 1.0),
    "navigational": (1e-2, 1e4),
    "higher": (1e-3, 10.0),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", help="corpus directory (default: corpus)")
    parser.add_argument("--work", help="work directory (default: work)")
    parser.add_argument("--config", help="JSON config file to start from")
    defaults = PipelineConfig()
    for name in (
        "window_length",
        "correlation_window",
        "grid_points",
        "sweep_sample",
        "label_top_k",
        "seed",
    ):
        flag = "--" + name.replace("_", "-")
        parser.add_argument(flag, type=int, default=None, help=f"default {getattr(defaults, name)}")
    for name in (
        "tau",
        "temporal_resolution",
        "structural_resolution",
        "navigational_resolution",
        "higher_resolution",
        "excess_gate",
        "edge_threshold",
        "similarity_low",
        "similarity_high",
    ):
        flag = "--" + name.replace("_", "-")
        parser.add_argument(
            flag, type=float, default=None, help=f"default {getattr(defaults, name)}"
        )


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    config = PipelineConfig.from_json(args.config) if args.config else PipelineConfig()
    updates = {}
    if args.corpus:
        updates["corpus_dir"] = args.corpus
    if args.work:
        updates["work_dir"] = args.work
    for field in dataclasses.fields(PipelineConfig):
        if field.name in ("corpus_dir", "work_dir"):
            continue
        value = getattr(args, field.name, None)
        if value is not None:
            updates[field.name] = value
    config = dataclasses.replace(config, **updates)
    return config.with_env_overrides()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coattention", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    for verb in _VERB_TO_STAGE:
        p = sub.add_parser(verb, help=f"run the {_VERB_TO_STAGE[verb]} stage")
        _add_config_flags(p)

    p = sub.add_parser("sweep", help="resolution stability sweep")
    _add_config_flags(p)
    p.add_argument("--kind", choices=sorted(_SWEEP_DEFAULTS), required=True)
    p.add_argument("--low", type=float, default=None)
    p.add_argument("--high", type=float, default=None)

    p = sub.add_parser("bench", help="synthetic benchmark: generate, run, score")
    _add_config_flags(p)
    p.add_argument("--out", required=True, help="benchmark output directory")
    p.add_argument("--events", type=int, default=SynthConfig.events)
    p.add_argument("--synth-seed", type=int, default=SynthConfig.seed)
    p.add_argument("--spike-amplitude", type=float, default=SynthConfig.spike_amplitude)
    p.add_argument("--noise-level", type=float, default=SynthConfig.noise_level)
    p.add_argument("--topic-count", type=int, default=SynthConfig.topic_count)

    p = sub.add_parser("agreement", help="two-coder label agreement summary")
    p.add_argument("label_files", nargs=2, help="two coder label JSON files")
    p.add_argument("--out", help="write the summary JSON here")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args)
    except MissingArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, RedirectError, ValueError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args: argparse.Namespace) -> int:
    if args.verb in _VERB_TO_STAGE:
        config = _config_from_args(args)
        pipeline = Pipeline(config)
        result = pipeline.run(_VERB_TO_STAGE[args.verb])
        status = "up to date (no-op)" if result.skipped else "completed"
        print(f"stage {result.stage}: {status}, {len(result.outputs)} artifacts")
        return 0

    if args.verb == "sweep":
        config = _config_from_args(args)
        low, high = _SWEEP_DEFAULTS[args.kind]
        out = Pipeline(config).run_sweep(
            args.kind,
            args.low if args.low is not None else low,
            args.high if args.high is not None else high,
            config.grid_points,
            config.sweep_sample,
        )
        print(f"sweep {args.kind}: report at {out}")
        return 0

    if args.verb == "bench":
        config = _config_from_args(args)
        synth = SynthConfig(
            events=args.events,
            seed=args.synth_seed,
            spike_amplitude=args.spike_amplitude,
            noise_level=args.noise_level,
            topic_count=args.topic_count if args.topic_count > 0 else None,
        )
        scores = run_benchmark(synth, args.out, config)
        print(
            json.dumps(
                {
                    "reaction_ec_mean": scores.reaction_ec_mean,
                    "reaction_exact_rate": scores.reaction_exact_rate,
                    "topic_ec": scores.topic_ec,
                    "structural_win_rate": scores.structural_win_rate,
                    "navigational_win_rate": scores.navigational_win_rate,
                },
                indent=2,
                sort_keys=True,
            )
        )
        return 0

    if args.verb == "agreement":
        records = []
        for path in args.label_files:
            records.extend(load_label_file(path))
        summary = agreement_summary(records)
        payload = json.dumps(summary.to_dict(), indent=2, sort_keys=True)
        if args.out:
            Path(args.out).write_text(payload + "\n", encoding="utf-8")
        print(payload)
        return 0

    raise AssertionError(f"unhandled verb {args.verb}")


if __name__ == "__main__":
    sys.exit(main())
