"""Command-line interface: serve, ingest, export, qa, eval, gen-corpus."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import AppConfig, load_config
from .corpus import generate_corpus, load_labels
from .errors import EvigraphError
from .evaluation import (
    DEFAULT_SWEEP_TAUS,
    PredictionTask,
    PredictorConfig,
    rows_to_csv,
    rows_to_json,
    run_sweep,
)
from .model import VariantKind
from .pipeline import Engine
from .qa import QAMode, QARequest, answer, compare, retrieve


def _canonical_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _engine(args) -> Engine:
    config = load_config(args.config) if args.config else load_config()
    data_dir = getattr(args, "data_dir", None)
    return Engine(config, data_dir=data_dir if data_dir else config.data_dir)


def cmd_serve(args) -> int:
    from .api import ApiServer

    engine = _engine(args)
    server = ApiServer(engine, args.host, args.port, ui_dir=args.ui_dir)
    print(f"serving on {server.url} (data_dir={engine.store.data_dir})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("shutting down")
    return 0


def cmd_ingest(args) -> int:
    engine = _engine(args)
    reports = engine.ingest_file(args.file)
    for report in reports:
        print(
            f"{report.subject_id} v{report.version}: "
            f"{report.n_triples} triples, {report.n_unmapped} unmapped"
        )
    print(f"ingested {len(reports)} records")
    return 0


def cmd_export(args) -> int:
    from .export import export_graph

    engine = _engine(args)
    kind = VariantKind.parse(args.variant)
    tau = args.tau
    if kind is VariantKind.FILTERED and tau is None:
        tau = engine.config.tau_default
    if kind is not VariantKind.FILTERED:
        tau = None
    variant = engine.get_variant(args.subject, kind, tau)
    payload = _canonical_json(export_graph(variant, engine.catalog))
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(payload)
    return 0


def cmd_qa(args) -> int:
    engine = _engine(args)
    if args.compare:
        result = compare(engine, args.subject, args.question, tau=args.tau, top_k=args.top_k)
        sys.stdout.write(_canonical_json(result.to_json()))
        return 0
    mode = QAMode.CONFIDENCE_AWARE if (args.mode == "confidence_aware" or args.tau is not None) \
        else QAMode.parse(args.mode)
    request = QARequest(
        subject_id=args.subject,
        question=args.question,
        mode=mode,
        tau=args.tau,
        top_k=args.top_k,
    )
    evidence = retrieve(request, engine.store, engine.dictionary)
    exchange = answer(request, evidence, engine.answer_generator(), engine.catalog)
    sys.stdout.write(_canonical_json(exchange.to_json()))
    return 0


def cmd_eval(args) -> int:
    from .plots import render_method_figure, render_sweep_figure

    engine = _engine(args)
    if args.records:
        engine = engine.spawn_ephemeral()
        engine.ingest_file(args.records)
    labels_obj = load_labels(args.labels)
    labels = {str(k): int(v) for k, v in labels_obj["labels"].items()}
    from dataclasses import replace

    rules = engine.config.risk
    if labels_obj.get("risk_concepts"):
        rules = replace(rules, concepts=tuple(labels_obj["risk_concepts"]))
    task = PredictionTask(
        subject_ids=tuple(sorted(labels)),
        labels=labels,
        predictor=PredictorConfig(generator=args.generator),
        runs=args.runs,
    )
    taus = DEFAULT_SWEEP_TAUS if args.sweep else (engine.config.tau_default,)
    rows = run_sweep(engine, task, rules, taus)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "metrics.csv"
    csv_path.write_text(rows_to_csv(rows), encoding="utf-8")
    (out_dir / "metrics.json").write_text(rows_to_json(rows) + "\n", encoding="utf-8")
    figures = [render_method_figure(rows, out_dir / "methods.png")]
    if args.sweep:
        figures.append(render_sweep_figure(rows, out_dir / "sweep.png"))
    print(rows_to_csv(rows), end="")
    print(f"wrote {csv_path}, metrics.json and {len(figures)} figure(s) to {out_dir}")
    return 0


def cmd_gen_corpus(args) -> int:
    engine_config = load_config(args.config) if args.config else AppConfig()
    from .dictionary import ConceptDictionary

    dictionary = ConceptDictionary.from_file(engine_config.resolved_dictionary_path())
    corpus = generate_corpus(
        seed=args.seed,
        n_subjects=args.subjects,
        visits_per_subject=args.visits,
        noise_rate=args.noise_rate,
        dictionary=dictionary,
        out_dir=args.out_dir,
    )
    print(
        f"wrote {len(corpus.records)} records for {args.subjects} subjects "
        f"({sum(corpus.labels.values())} positive) to {args.out_dir}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evigraph",
        description="Uncertainty-aware dynamic knowledge graphs with confidence-scored QA",
    )
    parser.add_argument("--config", help="path to a JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP API service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--ui-dir", default=None, help="directory of built UI assets")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("ingest", help="ingest a JSON Lines record file")
    p.add_argument("file")
    p.add_argument("--data-dir", default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("export", help="export one graph variant as JSON")
    p.add_argument("subject")
    p.add_argument("variant", choices=[k.value for k in VariantKind])
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("qa", help="ask a question over a subject's graph")
    p.add_argument("subject")
    p.add_argument("question")
    p.add_argument("--mode", default="baseline", choices=["baseline", "confidence_aware"])
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--compare", action="store_true", help="run both pipelines side by side")
    p.add_argument("--data-dir", default=None)
    p.set_defaults(func=cmd_qa)

    p = sub.add_parser("eval", help="run the outcome-prediction evaluation")
    p.add_argument("--records", default=None, help="record file to ingest into a fresh store")
    p.add_argument("--labels", required=True, help="labels JSON file")
    p.add_argument("--out-dir", default="eval-out")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--generator", default="rule", choices=["rule", "hash", "llm"])
    p.add_argument("--sweep", action="store_true", help="sweep tau from 0.0 to 1.0 in steps of 0.1")
    p.add_argument("--data-dir", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-corpus", help="generate a synthetic record corpus")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--subjects", type=int, default=20)
    p.add_argument("--visits", type=int, default=5)
    p.add_argument("--noise-rate", type=float, default=0.3)
    p.add_argument("--out-dir", default="corpus")
    p.set_defaults(func=cmd_gen_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EvigraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
