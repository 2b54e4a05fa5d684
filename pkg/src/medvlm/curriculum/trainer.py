"""Stage runner and curriculum orchestration.

Each stage rebuilds the optimizer, trains exactly stage.steps batches of
freshly generated corpus samples, and records per-step loss plus the
per-module learning rates actually applied. Frozen modules receive no
gradients and no optimizer state, so their bytes are untouched at stage
end. All randomness is keyed, making whole runs byte-reproducible.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import TrainingDivergedError
from ..model import MedVlm, save_checkpoint, toy_config
from ..model.decoder import decoder_forward
from ..model.params import module_of
from ..nn import Tensor, concat, cross_entropy
from ..nn.optim import ParamGroup, cosine_lr
from ..model.tokenizer import IMG_ID
from ..util import DirLock, digest_file, digest_obj, write_json, write_jsonl
from .data import Sample, build_corpus, corpus_digest
from .runcfg import TrainRunConfig
from .stages import StageSpec, stages_for_profile

log = logging.getLogger(__name__)

EMA_ALPHA = 0.1


@dataclass
class StageResult:
    name: str
    losses: list[float]
    smoothed_first: float
    smoothed_last: float

    @property
    def drop(self) -> float:
        return 1.0 - self.smoothed_last / self.smoothed_first


def ema(xs: list[float], alpha: float = EMA_ALPHA) -> list[float]:
    out: list[float] = []
    acc = xs[0]
    for x in xs:
        acc = alpha * x + (1 - alpha) * acc
        out.append(acc)
    return out


def batch_loss(model: MedVlm, p: dict[str, Tensor], samples: list[Sample]) -> Tensor:
    tok = model.tokenizer
    embeds: list[Tensor] = []
    label_rows: list[np.ndarray] = []
    max_t = 0
    for s in samples:
        prompt_ids = tok.encode(s.prompt, add_bos=True)
        target_ids = tok.encode(s.target, add_eos=True)
        imgs = [model.encode_image(p, im) for im in s.images]
        asm = model.assemble_sequence(p, prompt_ids + target_ids, imgs)
        t = asm.embeds.shape[0]
        loss_start = int(asm.text_pos[len(prompt_ids)])
        labels = np.full(t, -100, dtype=np.int64)
        nxt = asm.ids[1:]
        pos = np.arange(t - 1)
        valid = (pos + 1 >= loss_start) & (nxt != IMG_ID)
        labels[:-1][valid] = nxt[valid]
        embeds.append(asm.embeds)
        label_rows.append(labels)
        max_t = max(max_t, t)
    d = embeds[0].shape[-1]
    batch_labels = np.full((len(samples), max_t), -100, dtype=np.int64)
    rows = []
    for i, (e, lab) in enumerate(zip(embeds, label_rows)):
        if e.shape[0] < max_t:
            pad = Tensor(np.zeros((max_t - e.shape[0], d), dtype=e.data.dtype))
            e = concat([e, pad], axis=0)
        rows.append(e.reshape(1, max_t, d))
        batch_labels[i, :lab.shape[0]] = lab
    logits = decoder_forward(p, concat(rows, axis=0), model.config.decoder)
    return cross_entropy(logits, batch_labels)


def run_stage(model: MedVlm, stage: StageSpec, seed: int,
              log_rows: list[dict] | None = None) -> StageResult:
    stage.validate()
    corpus = build_corpus(stage.corpus, seed=seed,
                          size=stage.steps * stage.batch_size)
    groups = {m: ParamGroup(params={n: a for n, a in model.params.items()
                                    if module_of(n) == m})
              for m in sorted(stage.trainable)}
    losses: list[float] = []
    for step in range(stage.steps):
        batch = corpus[step * stage.batch_size:(step + 1) * stage.batch_size]
        p = model.wrap(set(stage.trainable))
        loss = batch_loss(model, p, batch)
        value = loss.item()
        if not np.isfinite(value):
            raise TrainingDivergedError(
                f"stage {stage.name}: loss became {value} at step {step}")
        loss.backward()
        factor = cosine_lr(step, stage.steps, 1.0, stage.warmup_steps)
        lrs = {m: stage.lr[m] * factor for m in sorted(stage.trainable)}
        for m, group in groups.items():
            grads = {n: t.grad for n, t in p.items()
                     if module_of(n) == m and t.grad is not None}
            group.step(grads, lr=lrs[m], weight_decay=stage.weight_decay)
        losses.append(value)
        if log_rows is not None:
            log_rows.append({"stage": stage.name, "step": step,
                             "loss": value, "lr": lrs})
        if step % 50 == 0:
            log.info("stage %s step %d/%d loss %.4f", stage.name, step,
                     stage.steps, value)
    sm = ema(losses)
    return StageResult(name=stage.name, losses=losses,
                       smoothed_first=sm[0], smoothed_last=sm[-1])


def train_curriculum(cfg: TrainRunConfig) -> dict:
    """Run all stages, write checkpoints, logs and a manifest; return the manifest."""
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stages = stages_for_profile(cfg.profile, tuple(cfg.steps), cfg.batch_size)
    if cfg.stages is not None:
        stages = [s for s in stages if s.name in cfg.stages]
    manifest: dict = {"kind": "train-run", "seed": cfg.seed, "profile": cfg.profile,
                      "model": cfg.model, "stage_filter": cfg.stages,
                      "stages": [], "digests": {}}
    with DirLock(out):
        start = time.monotonic()
        model = MedVlm.init(toy_config(), seed=cfg.seed)
        log_rows: list[dict] = []
        for idx, stage in enumerate(stages):
            corpus = build_corpus(stage.corpus, seed=cfg.seed,
                                  size=stage.steps * stage.batch_size)
            manifest["digests"][f"corpus:{stage.name}"] = corpus_digest(corpus)
            result = run_stage(model, stage, seed=cfg.seed, log_rows=log_rows)
            ckpt = out / f"stage{idx}-{stage.name}.ckpt"
            save_checkpoint(ckpt, model.params, model.config,
                            meta={"stage": stage.name, "seed": cfg.seed,
                                  "profile": cfg.profile})
            manifest["stages"].append({
                "name": stage.name, "steps": stage.steps,
                "trainable": sorted(stage.trainable),
                "lr": {m: stage.lr[m] for m in sorted(stage.lr)},
                "loss_first": result.smoothed_first,
                "loss_last": result.smoothed_last,
                "loss_drop": result.drop,
            })
            manifest["digests"][f"checkpoint:{ckpt.name}"] = digest_file(ckpt)
            log.info("stage %s done: smoothed loss %.4f -> %.4f (drop %.1f%%)",
                     stage.name, result.smoothed_first, result.smoothed_last,
                     100 * result.drop)
        final = out / "final.ckpt"
        save_checkpoint(final, model.params, model.config,
                        meta={"stage": "final", "seed": cfg.seed,
                              "profile": cfg.profile})
        manifest["digests"]["checkpoint:final.ckpt"] = digest_file(final)
        write_jsonl(out / "train_log.jsonl", log_rows)
        manifest["digests"]["train_log"] = digest_file(out / "train_log.jsonl")
        manifest["wall_time_s"] = round(time.monotonic() - start, 3)
        manifest["fingerprint"] = digest_obj(manifest)
        write_json(out / "manifest.json", manifest)
    return manifest
