"""Command-line entry point wiring generation, refinement, curation,
evaluation, and the training service behind one `mate` executable.

Exit codes: 0 success, 1 usage/validation errors, 2 runtime/backend errors.
Every successful command with file outputs writes a RunManifest beside them.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .backends import ENDPOINT_ENV, MODEL_ENV, ChatBackendSpec, spec_from_dict, spec_from_file
from .cases import load_cases
from .datastore import (
    DatasetStore,
    clean,
    compute_stats,
    dedupe_raw,
    export_sft,
    split,
)
from .dialogue import RunConfig, enumerate_jobs, per_job_backends, run_generation
from .errors import (
    ConflictError,
    FormatError,
    MateError,
    NotFoundError,
    StateError,
    ValidationError,
)
from .evaluate import empathy_eval, evaluate_objective, judge_run, paired_bootstrap_ci
from .guideline import Guideline, load_default_guideline, load_guideline
from .records import DataPair, RefinementStatus, pair_to_wire
from .util import atomic_write_json, now_iso
from .vgr import VgrConfig, vgr_pass


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


# -- shared helpers --------------------------------------------------------


def _load_backend(value: str | None, fallback: object = None) -> ChatBackendSpec:
    """Resolve a backend config: flag > config-file entry > environment."""
    if value:
        text = value.strip()
        if text.startswith("{"):
            return spec_from_dict(json.loads(text))
        return spec_from_file(value)
    if isinstance(fallback, dict):
        return spec_from_dict(fallback)
    if isinstance(fallback, str):
        return spec_from_file(fallback)
    url = os.environ.get(ENDPOINT_ENV)
    if url:
        return spec_from_dict(
            {
                "kind": "remote_endpoint",
                "endpoint_url": url,
                "model_name": os.environ.get(MODEL_ENV, "default"),
            }
        )
    raise ValidationError(
        f"no backend configured: pass a config path or inline JSON, or set {ENDPOINT_ENV}"
    )


def _load_guideline(path: str | None) -> Guideline:
    return load_guideline(path) if path else load_default_guideline()


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc.msg} (line {exc.lineno})") from exc


def _load_dataset(dataset: str) -> tuple[list[DataPair], int]:
    """Load a store directory or a bare JSONL file: (valid pairs, filtered)."""
    path = Path(dataset)
    if path.is_dir():
        rows = DatasetStore(path).load_raw()
    else:
        if not path.exists():
            raise NotFoundError(f"no dataset at {dataset}")
        rows = []
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rows.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise FormatError(f"{dataset}: line {lineno}: {exc.msg}") from exc
    return clean(dedupe_raw(rows))


def _write_pairs(path: Path, pairs: list[DataPair]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_wire(pair), ensure_ascii=False) + "\n")


def _config_digest(args: argparse.Namespace) -> str:
    payload = {k: v for k, v in vars(args).items() if k not in ("func", "started_at")}
    canon = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _write_manifest(
    args: argparse.Namespace, command: str, inputs: list, outputs: list
) -> None:
    if not outputs:
        return
    first = Path(outputs[0])
    target_dir = first if first.is_dir() else first.parent
    target_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "version": __version__,
        "config_digest": _config_digest(args),
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "started_at": args.started_at,
        "finished_at": now_iso(),
    }
    atomic_write_json(target_dir / f"manifest-{command}.json", manifest)


def _render_text(payload: object, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(payload, dict):
        lines = []
        for key, value in payload.items():
            if isinstance(value, (dict, list)):
                lines.append(f"{pad}{key}:")
                lines.append(_render_text(value, indent + 1))
            else:
                rendered = f"{value:.6f}" if isinstance(value, float) else str(value)
                lines.append(f"{pad}{key}: {rendered}")
        return "\n".join(lines)
    if isinstance(payload, list):
        return "\n".join(_render_text(item, indent) for item in payload)
    return f"{pad}{payload}"


def _emit(args: argparse.Namespace, payload: object) -> None:
    if getattr(args, "format", "json") == "text":
        print(_render_text(payload))
    else:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    report_out = getattr(args, "report_out", None)
    if report_out:
        atomic_write_json(report_out, payload)


# -- commands ---------------------------------------------------------------


def cmd_generate(args) -> int:
    cases = load_cases(args.cases)
    g = _load_guideline(args.guideline)
    config_raw = _read_json(args.config) if args.config else {}
    cfg = RunConfig.from_dict(config_raw)
    dialogue_spec = _load_backend(args.dialogue_backend, config_raw.get("dialogue_backend"))
    supervisor_spec = _load_backend(
        args.supervisor_backend, config_raw.get("supervisor_backend")
    )
    jobs = enumerate_jobs(cases, g, cfg.samples_per_combo, cfg.master_seed)
    store = DatasetStore(args.out)
    report = run_generation(
        jobs, cases, g, cfg, per_job_backends(dialogue_spec, supervisor_spec), store
    )
    _emit(args, {"jobs": len(jobs), **report.as_dict()})
    _write_manifest(
        args,
        "generate",
        [args.cases, args.guideline or "(default guideline)", args.config or ""],
        [args.out],
    )
    if report.failed and not report.succeeded and not report.skipped:
        return 2
    return 0


def cmd_refine(args) -> int:
    g = _load_guideline(args.guideline)
    pairs, filtered = _load_dataset(args.in_dir)
    config_raw = _read_json(args.config) if args.config else {}
    validator = _load_backend(args.validator, config_raw.get("validator"))
    cfg = VgrConfig(
        validator=validator,
        n_retry=int(config_raw.get("n_retry", 3)),
        temperature=float(config_raw.get("temperature", 0.7)),
    )
    refined, report = vgr_pass(pairs, cfg, g)
    out_store = DatasetStore(args.out)
    for pair in refined:
        out_store.append(pair)
        if pair.feedback.refinement_status is RefinementStatus.NEED_HUMAN:
            out_store.enqueue_review(pair)
    _emit(args, {**report.as_dict(), "filtered": filtered})
    _write_manifest(args, "refine", [args.in_dir, args.config or ""], [args.out])
    return 0


def cmd_stats(args) -> int:
    pairs, filtered = _load_dataset(args.dataset)
    _emit(args, compute_stats(pairs, filtered_count=filtered).as_dict())
    _write_manifest(args, "stats", [args.dataset], [args.report_out] if args.report_out else [])
    return 0


def cmd_split(args) -> int:
    pairs, _filtered = _load_dataset(args.dataset)
    train, test = split(pairs, args.test_fraction, args.seed)
    out_dir = Path(args.out)
    train_path, test_path = out_dir / "train.jsonl", out_dir / "test.jsonl"
    _write_pairs(train_path, train)
    _write_pairs(test_path, test)
    _emit(
        args,
        {
            "train": len(train),
            "test": len(test),
            "train_path": str(train_path),
            "test_path": str(test_path),
        },
    )
    _write_manifest(args, "split", [args.dataset], [str(out_dir)])
    return 0


def cmd_export_sft(args) -> int:
    g = _load_guideline(args.guideline)
    pairs, _filtered = _load_dataset(args.dataset)
    count = export_sft(pairs, g, args.out)
    _emit(args, {"exported": count, "path": args.out})
    _write_manifest(args, "export-sft", [args.dataset], [args.out])
    return 0


def cmd_review_list(args) -> int:
    store = DatasetStore(args.store)
    _emit(args, [item.as_dict() for item in store.list_review(args.include_resolved)])
    return 0


def cmd_review_resolve(args) -> int:
    store = DatasetStore(args.store)
    item = store.resolve_review(args.id, args.feedback, args.reviewer)
    _emit(args, item.as_dict())
    return 0


def cmd_eval_objective(args) -> int:
    g = _load_guideline(args.guideline)
    pairs, _filtered = _load_dataset(args.dataset)
    if not pairs:
        raise ValidationError("dataset holds no valid records")
    backend = _load_backend(args.backend)
    report = evaluate_objective(pairs, backend, g, max_retries=args.max_retries)
    _emit(args, report.as_dict())
    _write_manifest(
        args, "eval-objective", [args.dataset], [args.report_out] if args.report_out else []
    )
    return 0


def cmd_eval_judge(args) -> int:
    g = _load_guideline(args.guideline)
    pairs, _filtered = _load_dataset(args.dataset)
    if not pairs:
        raise ValidationError("dataset holds no valid records")
    report = judge_run(
        pairs,
        _load_backend(args.a),
        _load_backend(args.b),
        _load_backend(args.judge),
        g,
        seed=args.seed,
        n=args.n,
    )
    _emit(args, report.as_dict())
    _write_manifest(args, "eval-judge", [args.dataset], [args.report_out] if args.report_out else [])
    return 0


def cmd_eval_empathy(args) -> int:
    path = Path(args.dataset)
    if not path.exists():
        raise NotFoundError(f"no dataset at {args.dataset}")
    rows = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    report = empathy_eval(_load_backend(args.backend), rows)
    _emit(args, report)
    _write_manifest(args, "eval-empathy", [args.dataset], [args.report_out] if args.report_out else [])
    return 0


def _read_numbers(path: str) -> list[float]:
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        raise ValidationError(f"{path} is empty")
    if text.startswith("["):
        return [float(x) for x in json.loads(text)]
    return [float(line) for line in text.splitlines() if line.strip()]


def cmd_eval_bootstrap(args) -> int:
    result = paired_bootstrap_ci(
        _read_numbers(args.before),
        _read_numbers(args.after),
        n_resamples=args.n_resamples,
        level=args.level,
        seed=args.seed,
    )
    _emit(args, result.as_dict())
    _write_manifest(
        args, "eval-bootstrap", [args.before, args.after], [args.report_out] if args.report_out else []
    )
    return 0


def cmd_serve(args) -> int:
    from .datastore import DatasetStore as Store
    from .service import TrainingService, serve

    cases = load_cases(args.cases)
    g = _load_guideline(args.guideline)
    client_spec = _load_backend(args.backend)
    supervisor_spec = (
        _load_backend(args.supervisor_backend) if args.supervisor_backend else client_spec
    )
    service = TrainingService(
        cases,
        g,
        client_spec,
        supervisor_spec,
        Store(args.store),
        time_limit_seconds=args.time_limit,
        turn_limit=args.turn_limit,
    )
    serve(service, host=args.host, port=args.port, static_dir=args.static)
    return 0


# -- parser -----------------------------------------------------------------


def _add_common(parser: _Parser, out_file: bool = False) -> None:
    parser.add_argument("--format", choices=("json", "text"), default="json")
    if out_file:
        parser.add_argument(
            "--out", dest="report_out", default=None, help="also write the report here"
        )


def build_parser() -> _Parser:
    parser = _Parser(prog="mate", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="synthesize dialogue-feedback pairs")
    p.add_argument("--cases", required=True)
    p.add_argument("--guideline", default=None)
    p.add_argument("--config", default=None, help="run config JSON")
    p.add_argument("--dialogue-backend", default=None)
    p.add_argument("--supervisor-backend", default=None)
    p.add_argument("--out", required=True, help="dataset store directory")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("refine", help="validator-guided refinement pass")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--validator", default=None)
    p.add_argument("--guideline", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("--dataset", required=True)
    _add_common(p, out_file=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="stratified train/test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--test-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("export-sft", help="write chat-format training examples")
    p.add_argument("--dataset", required=True)
    p.add_argument("--guideline", default=None)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_export_sft)

    review = sub.add_parser("review", help="expert review queue")
    review_sub = review.add_subparsers(dest="review_command", required=True, parser_class=_Parser)
    p = review_sub.add_parser("list")
    p.add_argument("--store", required=True)
    p.add_argument("--include-resolved", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_review_list)
    p = review_sub.add_parser("resolve")
    p.add_argument("--store", required=True)
    p.add_argument("--id", required=True, help="dialogue_id of the escalated record")
    p.add_argument("--feedback", required=True)
    p.add_argument("--reviewer", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_review_resolve)

    evaluate = sub.add_parser("eval", help="evaluation harness")
    eval_sub = evaluate.add_subparsers(dest="eval_command", required=True, parser_class=_Parser)
    p = eval_sub.add_parser("objective")
    p.add_argument("--dataset", required=True)
    p.add_argument("--backend", required=True)
    p.add_argument("--guideline", default=None)
    p.add_argument("--max-retries", type=int, default=2)
    _add_common(p, out_file=True)
    p.set_defaults(func=cmd_eval_objective)
    p = eval_sub.add_parser("judge")
    p.add_argument("--dataset", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--judge", required=True)
    p.add_argument("--guideline", default=None)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p, out_file=True)
    p.set_defaults(func=cmd_eval_judge)
    p = eval_sub.add_parser("empathy")
    p.add_argument("--dataset", required=True, help="JSONL of {post, response, label}")
    p.add_argument("--backend", required=True)
    _add_common(p, out_file=True)
    p.set_defaults(func=cmd_eval_empathy)
    p = eval_sub.add_parser("bootstrap")
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.add_argument("--n-resamples", type=int, default=10000)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p, out_file=True)
    p.set_defaults(func=cmd_eval_bootstrap)

    p = sub.add_parser("serve", help="run the live training HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--cases", required=True)
    p.add_argument("--guideline", default=None)
    p.add_argument("--backend", required=True, help="client-agent backend config")
    p.add_argument("--supervisor-backend", default=None, help="defaults to --backend")
    p.add_argument("--store", required=True, help="store directory (records + sessions)")
    p.add_argument("--static", default=None, help="serve a built UI from this directory")
    p.add_argument("--time-limit", type=int, default=900, help="session seconds")
    p.add_argument("--turn-limit", type=int, default=20, help="trainee messages")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    args.started_at = now_iso()
    try:
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValidationError, FormatError, NotFoundError, ConflictError, StateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
