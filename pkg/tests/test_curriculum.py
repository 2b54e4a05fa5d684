import numpy as np
import pytest

from medvlm.curriculum import (StageSpec, default_stages, load_run_config, run_stage,
                               stages_for_profile, train_curriculum)
from medvlm.curriculum.runcfg import TrainRunConfig
from medvlm.curriculum.trainer import batch_loss, ema
from medvlm.curriculum.data import build_corpus
from medvlm.errors import ConfigError, TrainingDivergedError
from medvlm.model import MedVlm, load_checkpoint, toy_config
from medvlm.model.params import module_of


def test_default_stage_table():
    s0, s1, s2 = default_stages()
    assert s0.trainable == frozenset({"projector"})
    assert s0.lr == {"projector": 1e-3}
    assert s0.frozen == frozenset({"vision", "lm"})
    assert s1.trainable == frozenset({"projector", "lm"})
    assert s1.lr == {"projector": 2e-5, "lm": 2e-5}
    assert s1.frozen == frozenset({"vision"})
    assert s2.trainable == frozenset({"vision", "projector", "lm"})
    assert s2.lr == {"vision": 8e-5, "projector": 8e-5, "lm": 8e-5}
    assert s2.frozen == frozenset()
    for s in (s0, s1, s2):
        assert s.weight_decay == 0.05
        assert s.warmup_ratio == 0.03


def test_vision_trainable_profile_differs_only_in_mid():
    base = default_stages()
    alt = stages_for_profile("pt-vision-trainable")
    assert alt[0] == base[0]
    assert alt[2] == base[2]
    assert alt[1].trainable == frozenset({"vision", "projector", "lm"})
    assert alt[1].lr["vision"] == alt[1].lr["lm"] == 2e-5


def test_unknown_profile_rejected():
    with pytest.raises(ConfigError):
        stages_for_profile("bogus")


def test_stage_validation():
    with pytest.raises(ConfigError):
        StageSpec(name="x", trainable=frozenset(), lr={}, corpus="c", steps=1).validate()
    with pytest.raises(ConfigError):
        StageSpec(name="x", trainable=frozenset({"lm"}), lr={"projector": 1e-3},
                  corpus="c", steps=1).validate()
    with pytest.raises(ConfigError):
        StageSpec(name="x", trainable=frozenset({"lm"}), lr={"lm": -1.0},
                  corpus="c", steps=1).validate()


def test_ema_smoothing():
    xs = [10.0, 10.0, 0.0]
    sm = ema(xs, alpha=0.5)
    assert sm[0] == 10.0
    assert sm[1] == 10.0
    assert sm[2] == 5.0


def test_frozen_modules_unchanged_by_stage():
    model = MedVlm.init(toy_config(), seed=0)
    before = {n: a.tobytes() for n, a in model.params.items()}
    stage = StageSpec(name="align", trainable=frozenset({"projector"}),
                      lr={"projector": 1e-3}, corpus="synth-captions-v1",
                      steps=3, batch_size=2).validate()
    run_stage(model, stage, seed=0)
    changed = {n for n, a in model.params.items() if a.tobytes() != before[n]}
    assert changed, "projector should have moved"
    assert all(module_of(n) == "projector" for n in changed)


def test_lr_map_exact_at_warmup_end():
    model = MedVlm.init(toy_config(), seed=0)
    rows: list[dict] = []
    stage = StageSpec(name="mid", trainable=frozenset({"projector", "lm"}),
                      lr={"projector": 2e-5, "lm": 2e-5}, corpus="synth-reports-v1",
                      steps=40, batch_size=2, warmup_ratio=0.1).validate()
    run_stage(model, stage, seed=0, log_rows=rows)
    at_end = rows[stage.warmup_steps]["lr"]
    assert at_end["projector"] == 2e-5
    assert at_end["lm"] == 2e-5
    assert rows[0]["lr"]["lm"] == 0.0
    assert rows[-1]["lr"]["lm"] < 2e-5


def test_nan_loss_aborts(monkeypatch):
    import medvlm.curriculum.trainer as trainer_mod
    from medvlm.nn import Tensor

    def bad_loss(model, p, samples):
        return Tensor(np.array(float("nan")))

    monkeypatch.setattr(trainer_mod, "batch_loss", bad_loss)
    model = MedVlm.init(toy_config(), seed=0)
    stage = default_stages(steps=(2, 2, 2), batch_size=2)[0]
    with pytest.raises(TrainingDivergedError):
        trainer_mod.run_stage(model, stage, seed=0)


def test_batch_loss_handles_mixed_lengths():
    model = MedVlm.init(toy_config(), seed=0)
    p = model.wrap({"projector"})
    samples = build_corpus("synth-captions-v1", seed=0, size=2)
    samples[1].target = samples[1].target + " with a longer tail"
    loss = batch_loss(model, p, samples)
    assert np.isfinite(loss.item()) and loss.item() > 0


def test_train_curriculum_outputs(tmp_path):
    cfg = TrainRunConfig(seed=0, out=str(tmp_path / "run"), steps=[3, 3, 3],
                         batch_size=2).validate()
    manifest = train_curriculum(cfg)
    out = tmp_path / "run"
    assert (out / "final.ckpt").exists()
    assert (out / "train_log.jsonl").exists()
    assert (out / "manifest.json").exists()
    assert not (out / ".medvlm.lock").exists()
    names = [s["name"] for s in manifest["stages"]]
    assert names == ["align", "mid", "instruct"]
    assert "checkpoint:final.ckpt" in manifest["digests"]
    params, cfg2, meta = load_checkpoint(out / "final.ckpt")
    assert meta["stage"] == "final"
    assert cfg2 == toy_config()


def test_run_config_yaml(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text("seed: 3\nout: outdir\nprofile: pt-vision-trainable\n"
                 "steps: [2, 2, 2]\nbatch_size: 4\n")
    cfg = load_run_config(p)
    assert cfg.seed == 3
    assert cfg.profile == "pt-vision-trainable"
    assert cfg.steps == [2, 2, 2]


def test_run_config_unknown_key_named(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text("seed: 1\nlearning_rate: 5\n")
    with pytest.raises(ConfigError, match="learning_rate"):
        load_run_config(p)


def test_run_config_bad_values(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text("profile: nope\n")
    with pytest.raises(ConfigError):
        load_run_config(p)
    p.write_text("steps: [1, 2]\n")
    with pytest.raises(ConfigError):
        load_run_config(p)
