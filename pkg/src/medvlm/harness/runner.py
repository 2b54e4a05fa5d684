"""Concurrent eval runner with benchmark-order persistence and resume."""

from __future__ import annotations

import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Protocol, Sequence

from medvlm.bench.schema import BenchmarkInstance, load_bench
from medvlm.errors import DataError, EndpointError
from medvlm.harness.extract import extract_option
from medvlm.harness.scoring import EvalRecord, score_records
from medvlm.harness.templates import format_prompt
from medvlm.util import DirLock, atomic_write_bytes, digest_file, digest_obj, write_json

RESULTS_NAME = "results.jsonl"
PARTIAL_NAME = "results.partial.jsonl"
SUMMARY_NAME = "summary.json"


class ChatClient(Protocol):
    def complete(self, messages: list[dict]) -> "object": ...


def _load_existing(path: Path, keep_ids: set[str]) -> dict[str, EvalRecord]:
    out: dict[str, EvalRecord] = {}
    if not path.exists():
        return out
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            try:
                rec = EvalRecord.from_dict(json.loads(line))
            except (json.JSONDecodeError, DataError):
                # a torn trailing line from an interrupted run is re-requested
                continue
            if rec.instance_id in keep_ids:
                out[rec.instance_id] = rec
    return out


def _eval_one(inst: BenchmarkInstance, client: ChatClient, template_id: str) -> EvalRecord:
    t0 = time.perf_counter()
    try:
        result = client.complete(format_prompt(inst, template_id))
        raw = result.text
        attempts = result.attempts
        failed = False
    except EndpointError:
        raw = ""
        attempts = 0
        failed = True
    latency_ms = max(0.0, (time.perf_counter() - t0) * 1000.0)
    extracted = None
    if not failed and not inst.is_generation:
        extracted = extract_option(raw, inst.options)
    correct = extracted is not None and extracted == inst.answer_key
    return EvalRecord(
        instance_id=inst.id,
        raw_output=raw,
        extracted=extracted,
        gold=inst.answer_key,
        correct=correct,
        latency_ms=latency_ms,
        failed=failed,
        attempts=attempts,
    )


def run_eval(bench_path: str | Path, client: ChatClient, template_id: str,
             out_dir: str | Path, concurrency: int = 1, resume: bool = True) -> dict:
    """Evaluate every instance once; persist records in benchmark order.

    Completed records stream to a partial file as they finish, so an
    interrupted run resumes without re-requesting them.  The final results
    file and summary are written atomically and the partial file removed.
    """
    bench_path = Path(bench_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    instances = load_bench(bench_path)
    ids = {i.id for i in instances}

    t_start = time.perf_counter()
    with DirLock(out):
        partial = out / PARTIAL_NAME
        results = out / RESULTS_NAME
        completed: dict[str, EvalRecord] = {}
        if resume:
            completed.update(_load_existing(results, ids))
            completed.update(_load_existing(partial, ids))
        pending = [i for i in instances if i.id not in completed]

        append_lock = threading.Lock()
        with open(partial, "a", encoding="utf-8") as pf:
            def work(inst: BenchmarkInstance) -> EvalRecord:
                rec = _eval_one(inst, client, template_id)
                with append_lock:
                    pf.write(json.dumps(rec.to_dict()) + "\n")
                    pf.flush()
                return rec

            if concurrency <= 1:
                for inst in pending:
                    completed[inst.id] = work(inst)
            else:
                with ThreadPoolExecutor(max_workers=concurrency) as pool:
                    futures = {pool.submit(work, inst): inst for inst in pending}
                    for fut in as_completed(futures):
                        rec = fut.result()
                        completed[rec.instance_id] = rec

        ordered = [completed[i.id] for i in instances]
        rows = [r.to_dict() for r in ordered]
        payload = "".join(json.dumps(row) + "\n" for row in rows)
        atomic_write_bytes(results, payload.encode("utf-8"))

        summary = score_records(ordered, instances)
        summary.update({
            "bench": bench_path.name,
            "bench_digest": digest_file(bench_path),
            "template": template_id,
            "n_requested": len(pending),
            "results_digest": digest_obj(rows),
            "wall_time_s": round(time.perf_counter() - t_start, 3),
        })
        write_json(out / SUMMARY_NAME, summary)
        partial.unlink(missing_ok=True)
    return summary
