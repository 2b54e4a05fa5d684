import math

import numpy as np
import pytest

from medvlm.errors import ConfigError
from medvlm.nn import RopeConfig, Tensor, apply_rope, rope_angles, rope_frequencies, yarn_temperature
from medvlm.nn.rope import base_frequencies


def test_base_frequency_formula():
    inv = base_frequencies(8, 10000.0)
    for i in range(4):
        assert inv[i] == pytest.approx(10000.0 ** (-2 * i / 8), rel=1e-15)
    assert inv[0] == 1.0


def test_scale_one_is_bitwise_vanilla():
    cfg = RopeConfig(head_dim=64, theta_base=150000.0, original_context=4096, scale=1.0)
    scaled = rope_frequencies(cfg)
    vanilla = base_frequencies(64, 150000.0)
    assert scaled.tobytes() == vanilla.tobytes()


def test_scaled_frequencies_bounded_by_routes():
    cfg = RopeConfig(head_dim=64, theta_base=150000.0, original_context=4096, scale=32.0)
    inv = base_frequencies(64, 150000.0)
    out = rope_frequencies(cfg)
    # each frequency lies between full interpolation and no interpolation
    assert (out <= inv + 1e-18).all()
    assert (out >= inv / 32.0 - 1e-18).all()
    # fast dims (many rotations in the original window) stay unchanged
    wavelength = 2 * math.pi / inv
    rotations = 4096 / wavelength
    fast = rotations >= cfg.beta_fast
    slow = rotations <= cfg.beta_slow
    assert fast.any() and slow.any()
    assert np.array_equal(out[fast], inv[fast])
    assert np.allclose(out[slow], inv[slow] / 32.0, rtol=1e-15)


def test_temperature_values():
    assert yarn_temperature(1.0) == 1.0
    assert yarn_temperature(0.5) == 1.0
    assert yarn_temperature(32.0) == pytest.approx(0.1 * math.log(32.0) + 1.0, abs=1e-12)


def test_extended_context():
    cfg = RopeConfig(head_dim=64, theta_base=150000.0, original_context=4096, scale=32.0)
    assert cfg.validate().extended_context == 131072


@pytest.mark.parametrize("bad", [
    dict(head_dim=7),
    dict(head_dim=0),
    dict(head_dim=8, theta_base=0.5),
    dict(head_dim=8, original_context=0),
    dict(head_dim=8, scale=0.5),
    dict(head_dim=8, beta_fast=1.0, beta_slow=2.0),
])
def test_config_validation_rejects(bad):
    with pytest.raises(ConfigError):
        RopeConfig(**bad).validate()


def test_rotation_preserves_pair_norms():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(2, 5, 8))
    angles = rope_angles(np.arange(5), base_frequencies(8, 1000.0))
    y = apply_rope(Tensor(x), angles).data
    # rotation acts on pairs (i, i + d/2); their joint norm is invariant
    nx = x[..., :4] ** 2 + x[..., 4:] ** 2
    ny = y[..., :4] ** 2 + y[..., 4:] ** 2
    assert np.allclose(nx, ny, atol=1e-12)


def test_rotation_composes_additively():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(1, 3, 4))
    inv = base_frequencies(4, 500.0)
    a1 = rope_angles(np.arange(3), inv)
    a2 = rope_angles(np.arange(3) + 7, inv)
    once = apply_rope(Tensor(x), a1 + a2).data
    twice = apply_rope(apply_rope(Tensor(x), a1), a2).data
    assert np.allclose(once, twice, atol=1e-12)


def test_position_zero_is_identity():
    x = np.random.default_rng(2).normal(size=(1, 1, 6))
    angles = rope_angles(np.zeros(1), base_frequencies(6, 100.0))
    assert np.allclose(apply_rope(Tensor(x), angles).data, x)


def test_apply_rope_shape_checks():
    x = Tensor(np.zeros((1, 2, 6)))
    with pytest.raises(ConfigError):
        apply_rope(x, np.zeros((3, 3)))
    with pytest.raises(ConfigError):
        apply_rope(Tensor(np.zeros((1, 2, 5))), np.zeros((2, 2)))
