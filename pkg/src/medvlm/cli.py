"""Command-line entry point wiring data, training, benchmarks, eval and metrics.

Exit codes: 0 success, 1 runtime failure, 2 configuration error,
3 overlap detected by check-overlap.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from medvlm import __version__
from medvlm.bench.fixtures import (
    write_impression_inputs,
    write_mc_records,
    write_patient_trial_inputs,
)
from medvlm.bench.adapters import read_mc_records, read_notes, read_qrels, read_table, read_trials
from medvlm.bench.impression import build_impression_bench
from medvlm.bench.overlap import check_overlap
from medvlm.bench.schema import load_bench, save_bench
from medvlm.bench.subjects import MMLU_MED_SUBJECTS, MMMU_MED_SUBJECTS, aggregate_subjects
from medvlm.bench.trials import build_patient_trial_bench
from medvlm.curriculum.runcfg import TrainRunConfig, load_run_config
from medvlm.curriculum.trainer import train_curriculum
from medvlm.errors import ConfigError, MedvlmError, OverlapError
from medvlm.harness import (
    DEFAULT_TEMPLATE,
    EndpointConfig,
    EvalRecord,
    HttpChatClient,
    LocalChatClient,
    format_summary_table,
    run_eval,
    score_records,
)
from medvlm.manifest import write_manifest
from medvlm.metrics.composite import CompositeConfig
from medvlm.metrics.corpus import METRIC_NAMES, read_report_records, score_report_corpus
from medvlm.util import read_jsonl, write_json

log = logging.getLogger("medvlm")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_OVERLAP = 3

SUBJECT_SETS = {"mmlu-med": MMLU_MED_SUBJECTS, "mmmu-med": MMMU_MED_SUBJECTS}


# ---- train ----------------------------------------------------------------

def cmd_train(args: argparse.Namespace) -> int:
    if args.config:
        cfg = load_run_config(args.config)
    else:
        cfg = TrainRunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.profile is not None:
        cfg.profile = args.profile
    if args.steps is not None:
        cfg.steps = args.steps
    if args.batch_size is not None:
        cfg.batch_size = args.batch_size
    if args.stages is not None:
        cfg.stages = [s.strip() for s in args.stages.split(",") if s.strip()]
    cfg.validate()
    manifest = train_curriculum(cfg)
    for stage in manifest["stages"]:
        print(f"stage {stage['name']}: smoothed loss "
              f"{stage['loss_first']:.4f} -> {stage['loss_last']:.4f} "
              f"(drop {100 * stage['loss_drop']:.1f}%)")
    print(f"artifacts in {cfg.out} (fingerprint {manifest['fingerprint'][:12]})")
    return EXIT_OK


# ---- build-bench ----------------------------------------------------------

def _require(args: argparse.Namespace, names: list[str]) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise ConfigError(
            f"task {args.task!r} requires --{', --'.join(missing)}")


def cmd_build_bench(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bench_path = out / "bench.jsonl"
    inputs: dict[str, Path] = {}
    outputs: dict[str, Path] = {"bench.jsonl": bench_path}
    config: dict = {"task": args.task, "seed": args.seed}

    if args.task == "subjects":
        _require(args, ["records"])
        records = read_mc_records(args.records)
        allow = SUBJECT_SETS[args.subject_set]
        instances = aggregate_subjects(records, allow)
        config["subject_set"] = args.subject_set
        inputs["records"] = Path(args.records)
    elif args.task == "patient-trial":
        _require(args, ["qrels", "notes", "trials"])
        notes = read_notes(args.notes)
        trials = read_trials(args.trials)
        qrels = read_qrels(args.qrels)
        instances, report = build_patient_trial_bench(notes, trials, qrels, args.seed)
        report_path = out / "build_report.json"
        write_json(report_path, report.to_dict())
        outputs["build_report.json"] = report_path
        inputs.update({"qrels": Path(args.qrels), "notes": Path(args.notes),
                       "trials": Path(args.trials)})
    else:  # impression
        _require(args, ["studies", "reports"])
        studies = read_table(args.studies, required=("study_id", "image_path"))
        reports = read_table(args.reports, required=("study_id",))
        instances = build_impression_bench(studies, reports,
                                           shots=args.shots, seed=args.seed)
        config["shots"] = args.shots
        inputs.update({"studies": Path(args.studies), "reports": Path(args.reports)})

    save_bench(bench_path, instances)
    write_manifest(out, "build-bench", config, inputs, outputs)
    print(f"wrote {len(instances)} instances to {bench_path}")
    return EXIT_OK


# ---- eval -----------------------------------------------------------------

def _make_client(args: argparse.Namespace) -> tuple[object, str]:
    cfg = EndpointConfig(
        base_url=args.endpoint if args.endpoint.startswith("http") else "",
        model=args.model,
        timeout_s=args.timeout,
        max_retries=args.max_retries,
        concurrency=args.concurrency,
        max_new_tokens=args.max_new_tokens,
        stop=tuple(args.stop or ()),
    )
    if args.endpoint.startswith("local:"):
        ckpt = args.endpoint[len("local:"):]
        if not Path(ckpt).is_file():
            raise ConfigError(f"checkpoint not found: {ckpt}")
        return LocalChatClient(ckpt, cfg), f"local:{Path(ckpt).name}"
    if args.endpoint.startswith(("http://", "https://")):
        return HttpChatClient(cfg), args.endpoint
    raise ConfigError(
        f"endpoint must be an http(s) URL or local:CHECKPOINT, got {args.endpoint!r}")


def cmd_eval(args: argparse.Namespace) -> int:
    client, endpoint_label = _make_client(args)
    out = Path(args.out)
    summary = run_eval(args.bench, client, args.template, out,
                       concurrency=args.concurrency, resume=not args.no_resume)
    config = {
        "endpoint": endpoint_label,
        "template": args.template,
        "model": args.model,
        "max_new_tokens": args.max_new_tokens,
        "stop": list(args.stop or ()),
    }
    write_manifest(out, "eval", config,
                   inputs={"bench": Path(args.bench)},
                   outputs={"results.jsonl": out / "results.jsonl",
                            "summary.json": out / "summary.json"})
    print(format_summary_table(summary))
    return EXIT_OK


# ---- score ----------------------------------------------------------------

def cmd_score(args: argparse.Namespace) -> int:
    records = [EvalRecord.from_dict(r) for r in read_jsonl(args.results)]
    instances = load_bench(args.bench) if args.bench else None
    summary = score_records(records, instances)
    print(format_summary_table(summary))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "summary.json", summary)
        inputs = {"results": Path(args.results)}
        if args.bench:
            inputs["bench"] = Path(args.bench)
        write_manifest(out, "score", {}, inputs,
                       outputs={"summary.json": out / "summary.json"})
    return EXIT_OK


# ---- metrics --------------------------------------------------------------

def cmd_metrics(args: argparse.Namespace) -> int:
    composite = CompositeConfig(w0=args.w0, w1=args.w1, w2=args.w2)
    result = score_report_corpus(read_report_records(args.pred),
                                 read_report_records(args.ref),
                                 args.metric, composite)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_json(out, result)
    write_manifest(out.parent, "metrics",
                   {"metric": args.metric,
                    "weights": {"w0": args.w0, "w1": args.w1, "w2": args.w2}},
                   inputs={"pred": Path(args.pred), "ref": Path(args.ref)},
                   outputs={out.name: out})
    print(f"{args.metric} over {result['n']} reports: mean {result['mean']:.4f}")
    if result.get("reciprocal_mean") is not None:
        print(f"reciprocal mean: {result['reciprocal_mean']:.4f}")
    return EXIT_OK


# ---- check-overlap --------------------------------------------------------

def _read_train_texts(path: str) -> list[str]:
    p = Path(path)
    if p.suffix == ".jsonl":
        texts = []
        for i, rec in enumerate(read_jsonl(p), start=1):
            if not isinstance(rec, dict) or "text" not in rec:
                raise ConfigError(f"{p}:{i}: training record needs a text field")
            texts.append(rec["text"])
        return texts
    return [line for line in p.read_text(encoding="utf-8").splitlines() if line.strip()]


def cmd_check_overlap(args: argparse.Namespace) -> int:
    texts = _read_train_texts(args.train_texts)
    images = None
    if args.train_images_dir:
        images = sorted(str(f) for f in Path(args.train_images_dir).rglob("*")
                        if f.is_file())
    report = check_overlap(texts, load_bench(args.bench), images)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_json(out, report)
        write_manifest(out.parent, "check-overlap", {},
                       inputs={"bench": Path(args.bench),
                               "train_texts": Path(args.train_texts)},
                       outputs={out.name: out})
    print(f"checked {report['n_eval']} eval instances against "
          f"{report['n_train']} training texts: {report['n_overlap']} overlaps")
    for o in report["overlaps"][:10]:
        print(f"  overlap: {o}")
    if report["n_overlap"] > 0:
        raise OverlapError(f"{report['n_overlap']} eval instances overlap training data")
    return EXIT_OK


# ---- fixtures -------------------------------------------------------------

def cmd_fixtures(args: argparse.Namespace) -> int:
    out = Path(args.out)
    if args.kind == "patient-trial":
        paths = write_patient_trial_inputs(out, args.seed)
        names = {k: str(v) for k, v in paths.items()}
    elif args.kind == "impression":
        paths = write_impression_inputs(out, args.seed)
        names = {k: str(v) for k, v in paths.items()}
    else:  # mc-records
        path = write_mc_records(out, args.seed)
        names = {"records": str(path)}
    for k, v in sorted(names.items()):
        print(f"{k}: {v}")
    return EXIT_OK


# ---- serve ----------------------------------------------------------------

def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from medvlm.server import create_app

    if not Path(args.checkpoint).is_file():
        raise ConfigError(f"checkpoint not found: {args.checkpoint}")
    app = create_app(args.checkpoint)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# ---- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medvlm",
        description="Desk-scale multimodal training, benchmarking and eval pipeline.")
    parser.add_argument("--version", action="version", version=f"medvlm {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run the staged training curriculum")
    p.add_argument("--config", help="YAML run config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--profile")
    p.add_argument("--steps", type=int, nargs=3, metavar=("S0", "S1", "S2"))
    p.add_argument("--batch-size", type=int)
    p.add_argument("--stages", help="comma-separated subset of stage names")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("build-bench", help="construct a benchmark file")
    p.add_argument("--task", required=True,
                   choices=["subjects", "patient-trial", "impression"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--records", help="unified MC records (subjects task)")
    p.add_argument("--subject-set", choices=sorted(SUBJECT_SETS), default="mmlu-med")
    p.add_argument("--qrels")
    p.add_argument("--notes")
    p.add_argument("--trials")
    p.add_argument("--studies")
    p.add_argument("--reports")
    p.add_argument("--shots", type=int, default=1, choices=[0, 1])
    p.set_defaults(func=cmd_build_bench)

    p = sub.add_parser("eval", help="run a model over a benchmark")
    p.add_argument("--bench", required=True)
    p.add_argument("--endpoint", required=True,
                   help="http(s) URL or local:CHECKPOINT")
    p.add_argument("--template", default=DEFAULT_TEMPLATE)
    p.add_argument("--out", required=True)
    p.add_argument("--concurrency", type=int, default=1)
    p.add_argument("--model", default="medvlm-toy")
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--max-retries", type=int, default=2)
    p.add_argument("--max-new-tokens", type=int, default=2048)
    p.add_argument("--stop", action="append")
    p.add_argument("--no-resume", action="store_true",
                   help="ignore existing partial results")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("score", help="recompute accuracy from a results file")
    p.add_argument("--results", required=True)
    p.add_argument("--bench")
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("metrics", help="score generated reports against references")
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--metric", required=True, choices=list(METRIC_NAMES))
    p.add_argument("--out", required=True)
    p.add_argument("--w0", type=float, default=0.0)
    p.add_argument("--w1", type=float, default=1.0)
    p.add_argument("--w2", type=float, default=1.0)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("check-overlap", help="detect train/eval contamination")
    p.add_argument("--train-texts", required=True,
                   help="training texts, plain lines or JSONL with a text field")
    p.add_argument("--train-images-dir")
    p.add_argument("--bench", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check_overlap)

    p = sub.add_parser("fixtures", help="write synthetic input fixtures")
    p.add_argument("--kind", required=True,
                   choices=["patient-trial", "impression", "mc-records"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("serve", help="serve a checkpoint over HTTP")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8035)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OverlapError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_OVERLAP
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except MedvlmError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
