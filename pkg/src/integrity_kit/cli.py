"""Command-line interface.

    integrity-kit synth  --schema S --n N --fake-frac F --seed K --out D.csv
    integrity-kit train  --schema S --data D.csv --rules R.json --model rf|logreg|gbt
                         --seed K --test-frac 0.2 --out M.json --report E.json
    integrity-kit eval   --model M.json --schema S --data D.csv --report E.json
    integrity-kit filter --model M.json --schema S --rules R.json --data raw.csv
                         --retained a.csv --flagged b.csv [--drop-suspicious]
    integrity-kit report --eval E.json [--scatter scatter-inputs.csv] --out-dir DIR
    integrity-kit serve  --model M.json --schema S --rules R.json --port P

``--schema example`` / ``--rules example`` select the bundled survey.
Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import data
from .errors import IntegrityKitError
from .ingest import read_labeled_csv, responses_to_csv
from .models import ForestConfig, GbtConfig
from .pipeline import (
    PipelineConfig,
    TrainedModel,
    evaluate_model,
    filter_csvs,
    judge,
    load_pipeline_config,
    preprocess,
    run_filter,
    run_training,
    segment,
)
from .report import (
    emit_eval_json,
    metrics_table,
    read_scatter_inputs,
    scatter_inputs_csv,
    scatter_rows,
    write_report,
)
from .rules import load_rules
from .schema import load_schema
from .synth import FakeBehavior, SynthConfig, generate_dataset

SEED_ENV = "INTEGRITY_KIT_SEED"
EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(path)
    return p


def _schema(arg: str):
    return data.example_schema() if arg == "example" else load_schema(_existing(arg))


def _rules(arg: str, schema):
    return data.example_rules() if arg == "example" else load_rules(_existing(arg), schema)


def _model(arg: str) -> TrainedModel:
    return TrainedModel.loads(_existing(arg).read_bytes())


def _write(path: str, payload: bytes) -> None:
    p = Path(path)
    if p.parent != Path(""):
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_bytes(payload)


def _parse_mix(text: str | None):
    if not text:
        return None
    mix = {}
    for part in text.split(","):
        name, _, weight = part.partition("=")
        try:
            mix[FakeBehavior(name.strip())] = float(weight)
        except ValueError:
            raise UsageError(f"bad --behavior-mix entry {part!r}")
    return mix


def cmd_synth(args) -> int:
    schema = _schema(args.schema)
    kwargs = dict(n=args.n, fake_fraction=args.fake_frac, seed=args.seed)
    mix = _parse_mix(args.behavior_mix)
    if mix:
        kwargs["behavior_mix"] = mix
    try:
        config = SynthConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc))
    rules = data.example_rules() if args.rules in (None, "example") else load_rules(_existing(args.rules), schema)
    raws, labels = generate_dataset(schema, config, rules=rules)
    _write(args.out, responses_to_csv(schema, raws, labels))
    print(f"wrote {len(raws)} responses ({sum(labels)} fake) to {args.out}")
    return EXIT_OK


def _train_config(args) -> PipelineConfig:
    base = PipelineConfig()
    if args.config:
        base, _ = load_pipeline_config(_existing(args.config))
    kind = args.model or base.model_kind
    model_config = None if args.model and args.model != base.model_kind else base.model_config
    if kind in ("rf", "forest"):
        cfg = model_config if isinstance(model_config, ForestConfig) else ForestConfig()
        overrides = {"seed": args.seed}
        if args.trees is not None:
            overrides["n_trees"] = args.trees
        if args.depth is not None:
            overrides["max_depth"] = args.depth
        model_config = replace(cfg, **overrides)
    elif kind == "gbt" and args.depth is not None:
        model_config = replace(model_config if isinstance(model_config, GbtConfig) else GbtConfig(), max_depth=args.depth)
    return replace(
        base,
        model_kind=kind,
        model_config=model_config,
        seed=args.seed,
        test_fraction=args.test_frac if args.test_frac is not None else base.test_fraction,
        decision_threshold=args.threshold if args.threshold is not None else base.decision_threshold,
        include_scores=base.include_scores and not args.no_scores,
        n_jobs=args.jobs,
    )


def cmd_train(args) -> int:
    schema = _schema(args.schema)
    rules = _rules(args.rules, schema)
    raws, labels = read_labeled_csv(_existing(args.data).read_bytes(), schema)
    if labels is None:
        raise IntegrityKitError(f"{args.data}: training data needs an Is_Fake column")
    try:
        config = _train_config(args)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))
    trained, report = run_training(schema, raws, labels, rules, config)
    _write(args.out, trained.dumps())
    _write(args.report, emit_eval_json(report))
    if args.scatter_inputs:
        _write(args.scatter_inputs, scatter_inputs_csv(judge(trained, schema, rules, raws)))
    print(metrics_table([report]))
    return EXIT_OK


def cmd_eval(args) -> int:
    schema = _schema(args.schema)
    trained = _model(args.model)
    raws, labels = read_labeled_csv(_existing(args.data).read_bytes(), schema)
    if labels is None:
        raise IntegrityKitError(f"{args.data}: evaluation data needs an Is_Fake column")
    report = evaluate_model(trained, schema, raws, labels)
    _write(args.report, emit_eval_json(report))
    if args.scatter_inputs:
        _write(args.scatter_inputs, scatter_inputs_csv(judge(trained, schema, trained.ruleset, raws)))
    print(metrics_table([report]))
    return EXIT_OK


def cmd_filter(args) -> int:
    schema = _schema(args.schema)
    rules = _rules(args.rules, schema)
    trained = _model(args.model)
    raws, labels = read_labeled_csv(_existing(args.data).read_bytes(), schema)
    config = PipelineConfig(drop_suspicious_pre_model=args.drop_suspicious)
    outcome = run_filter(schema, raws, trained, rules, config)
    retained, flagged = filter_csvs(schema, raws, outcome, labels)
    _write(args.retained, retained)
    _write(args.flagged, flagged)
    print(f"retained {len(outcome.retained)}, flagged {len(outcome.flagged)}")
    if args.segment_by:
        keep = {rid for rid in outcome.retained}
        cleans = [c for raw, c in zip(raws, preprocess(raws, schema)) if raw.respondent_id in keep]
        report = segment(cleans, [s.strip() for s in args.segment_by.split(",") if s.strip()], schema)
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
        if args.segments:
            _write(args.segments, text.encode("utf-8"))
        else:
            print(text, end="")
    return EXIT_OK


def cmd_report(args) -> int:
    from .evaluation import EvalReport

    try:
        report = EvalReport.from_dict(json.loads(_existing(args.eval).read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise IntegrityKitError(f"{args.eval}: not an eval report ({exc!r})")
    scatter = None
    if args.scatter:
        logic, texts, preds = read_scatter_inputs(_existing(args.scatter).read_bytes())
        scatter = scatter_rows(logic, texts, preds, args.seed)
    for path in write_report(args.out_dir, report, scatter, args.top_k):
        print(path)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import ValidationService, make_server

    schema = _schema(args.schema)
    service = ValidationService(_model(args.model), schema, _rules(args.rules, schema), args.drop_suspicious)
    server = make_server(service, args.host, args.port)
    print(f"serving on http://{args.host}:{server.server_address[1]}/v1/validate", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def build_parser(default_seed: int) -> argparse.ArgumentParser:
    parser = _Parser(prog="integrity-kit", description="Survey response integrity analytics.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a labeled synthetic survey CSV")
    p.add_argument("--schema", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fake-frac", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--rules", help="rule set used to build contradictions (default: bundled)")
    p.add_argument("--behavior-mix", help="e.g. contradictor=1,blank_heavy=1,gibberish=1,straightliner=1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train and evaluate a classifier")
    p.add_argument("--schema", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--model", choices=["rf", "logreg", "gbt"])
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--test-frac", type=float)
    p.add_argument("--threshold", type=float, help="decision threshold on prob_fake (default 0.5)")
    p.add_argument("--trees", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--jobs", type=int, default=1, help="threads for forest training")
    p.add_argument("--no-scores", action="store_true", help="leave logic/text scores out of the features")
    p.add_argument("--config", help="pipeline config JSON supplying defaults")
    p.add_argument("--out", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--scatter-inputs")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained model on labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--scatter-inputs")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("filter", help="split responses into retained and flagged")
    p.add_argument("--model", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--retained", required=True)
    p.add_argument("--flagged", required=True)
    p.add_argument("--drop-suspicious", action="store_true", help="flag logic-suspicious responses before the model")
    p.add_argument("--segment-by", help="comma-separated question ids to count among retained responses")
    p.add_argument("--segments", help="write the segment counts here instead of stdout")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("report", help="render SVG/CSV artifacts from an eval report")
    p.add_argument("--eval", required=True)
    p.add_argument("--scatter")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--top-k", type=int, default=15)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP validation endpoint")
    p.add_argument("--model", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--drop-suspicious", action="store_true")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser(_default_seed())
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(f"integrity-kit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"integrity-kit: error: no such file: {exc.filename or exc.args[0]}", file=sys.stderr)
        return EXIT_DATA
    except IntegrityKitError as exc:
        print(f"integrity-kit: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
