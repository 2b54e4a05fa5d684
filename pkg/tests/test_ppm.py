import numpy as np
import pytest

from medvlm.errors import DataError
from medvlm.model.ppm import bilinear_resize, read_ppm, write_ppm


def _rand_image(h, w, seed=0):
    return np.random.default_rng(seed).integers(0, 256, size=(h, w, 3), dtype=np.uint8)


def test_round_trip(tmp_path):
    img = _rand_image(5, 7)
    p = tmp_path / "a.ppm"
    write_ppm(p, img)
    back = read_ppm(p)
    assert back.shape == (5, 7, 3)
    assert np.array_equal(back, img)


def test_header_with_comments(tmp_path):
    img = _rand_image(2, 3, seed=1)
    raw = b"P6\n# a comment\n3 2\n# another\n255\n" + img.tobytes()
    p = tmp_path / "c.ppm"
    p.write_bytes(raw)
    assert np.array_equal(read_ppm(p), img)


def test_rejects_non_p6(tmp_path):
    p = tmp_path / "bad.ppm"
    p.write_bytes(b"P3\n1 1\n255\n0 0 0\n")
    with pytest.raises(DataError):
        read_ppm(p)


def test_rejects_truncated_payload(tmp_path):
    p = tmp_path / "t.ppm"
    p.write_bytes(b"P6\n2 2\n255\n" + b"\x00" * 5)
    with pytest.raises(DataError):
        read_ppm(p)


def test_rejects_wrong_maxval(tmp_path):
    p = tmp_path / "m.ppm"
    p.write_bytes(b"P6\n1 1\n65535\n" + b"\x00" * 6)
    with pytest.raises(DataError):
        read_ppm(p)


def test_write_rejects_bad_array(tmp_path):
    with pytest.raises(DataError):
        write_ppm(tmp_path / "x.ppm", np.zeros((2, 2, 3), dtype=np.float32))


def test_resize_identity_copies():
    img = _rand_image(4, 4, seed=2)
    out = bilinear_resize(img, 4, 4)
    assert np.array_equal(out, img)
    assert out.base is None or out.base is not img


def test_resize_2x2_to_1x1_is_mean():
    img = np.zeros((2, 2, 3), dtype=np.uint8)
    img[..., 0] = [[10, 20], [30, 40]]
    out = bilinear_resize(img, 1, 1)
    assert out[0, 0, 0] == 25


def test_resize_upsample_constant_stays_constant():
    img = np.full((3, 5, 3), 77, dtype=np.uint8)
    out = bilinear_resize(img, 9, 10)
    assert (out == 77).all()


def test_resize_deterministic_bytes():
    img = _rand_image(13, 17, seed=3)
    a = bilinear_resize(img, 7, 29).tobytes()
    b = bilinear_resize(img, 7, 29).tobytes()
    assert a == b
