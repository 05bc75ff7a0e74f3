import numpy as np
import pytest
from PIL import Image

from holosearch.target import (
    EnergyNorm,
    Layout,
    TargetError,
    TargetSpec,
    build_target,
    load_image,
    save_gray16,
    test_pattern as make_pattern,
)


def test_white_quadrant_4x4():
    t = build_target(TargetSpec(np.ones((2, 2)), (4, 4)))
    c = t.centred()
    block = c[1:3, 1:3]
    assert np.all(block.imag == 0) and np.all(block.real > 0)
    assert np.all(block == block[0, 0])
    outside = c.copy()
    outside[1:3, 1:3] = 0
    assert np.all(outside == 0)


def test_constant_half_phase_is_pi():
    t = build_target(TargetSpec(np.ones((4, 4)), (8, 8), phase_image=np.full((4, 4), 0.5)))
    block = t.centred()[2:6, 2:6]
    np.testing.assert_allclose(np.angle(block), np.pi, atol=1e-15)


def test_phase_one_wraps_to_zero():
    t = build_target(TargetSpec(np.ones((2, 2)), (4, 4), phase_image=np.ones((2, 2))))
    assert np.all(t.centred()[1:3, 1:3].imag == 0)


def test_parseval_matched_energy(rng):
    amp = rng.random((16, 12))
    t = build_target(TargetSpec(amp, (32, 24), rng.random((16, 12))))
    assert abs(np.sum(np.abs(t.field) ** 2) - 32 * 24) < 1e-9
    np.testing.assert_allclose(t.roi_amplitude(t.field), amp, atol=1e-12)


def test_unit_max_and_full_field(rng):
    amp = 0.5 * rng.random((6, 6))
    t = build_target(TargetSpec(amp, (6, 6), layout=Layout.FULL_FIELD, energy_norm=EnergyNorm.UNIT_MAX))
    assert np.max(np.abs(t.field)) == pytest.approx(1.0)
    np.testing.assert_allclose(np.abs(t.centred()), amp / amp.max())
    assert t.region.mask.sum() == 36


def test_zero_outside_quadrant_exactly(rng):
    t = build_target(TargetSpec(rng.random((8, 8)), (16, 16), rng.random((8, 8))))
    c = t.centred()
    c[4:12, 4:12] = 0
    assert np.count_nonzero(c) == 0
    np.testing.assert_array_equal(t.region.mask > 0, np.abs(t.field) > 0)


def test_build_is_deterministic(rng):
    amp, ph = rng.random((4, 4)), rng.random((4, 4))
    a = build_target(TargetSpec(amp, (8, 8), ph))
    b = build_target(TargetSpec(amp, (8, 8), ph))
    np.testing.assert_array_equal(a.field, b.field)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(amplitude_image=np.ones((3, 3)), field_shape=(6, 6), phase_image=np.ones((2, 3))),
        dict(amplitude_image=np.ones((3, 3)), field_shape=(6, 6), phase_image=np.ones((3, 3)) * 1.5),
        dict(amplitude_image=np.ones((2, 2)), field_shape=(5, 4)),
        dict(amplitude_image=np.ones((3, 3)), field_shape=(8, 8)),
        dict(amplitude_image=np.zeros((2, 2)), field_shape=(4, 4)),
        dict(amplitude_image=np.full((2, 2), 2.0), field_shape=(4, 4)),
    ],
)
def test_build_errors(kwargs):
    with pytest.raises(TargetError):
        build_target(TargetSpec(**kwargs))


def _rec709_y_row():
    # RGB -> XYZ from Rec. 709 primaries and D65 white; the Y row is the luma weighting
    prim = {"r": (0.64, 0.33), "g": (0.30, 0.60), "b": (0.15, 0.06)}
    white = (0.3127, 0.3290)

    def xyz(xy):
        x, y = xy
        return np.array([x / y, 1.0, (1 - x - y) / y])

    m = np.column_stack([xyz(prim[c]) for c in "rgb"])
    s = np.linalg.solve(m, xyz(white))
    return m[1] * s


def test_luma_oracle():
    np.testing.assert_allclose(_rec709_y_row(), [0.2126, 0.7152, 0.0722], atol=5e-5)


def test_load_png_8bit(tmp_path):
    p = tmp_path / "g.png"
    Image.fromarray(np.array([[0, 128, 255]], dtype=np.uint8)).save(p)
    np.testing.assert_allclose(load_image(p), [[0.0, 128 / 255, 1.0]])


def test_load_png_rgb(tmp_path):
    p = tmp_path / "c.png"
    px = np.array([[[255, 0, 0], [0, 255, 0], [0, 0, 255], [255, 255, 255]]], dtype=np.uint8)
    Image.fromarray(px).save(p)
    img = load_image(p)
    np.testing.assert_allclose(img[0, :3], _rec709_y_row(), atol=1e-4)
    assert img[0, 0] == pytest.approx(0.2126, abs=1e-12)
    assert img[0, 3] == pytest.approx(1.0)


def test_load_png_16bit_round_trip(tmp_path, rng):
    p = tmp_path / "w.png"
    img = rng.random((5, 7))
    save_gray16(p, img)
    back = load_image(p)
    assert back.shape == (5, 7)
    np.testing.assert_allclose(back, np.round(img * 65535) / 65535)


def _write_pgm(path, arr, maxval):
    dtype = ">u2" if maxval > 255 else "u1"
    header = f"P5\n# comment\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode()
    path.write_bytes(header + np.asarray(arr, dtype=dtype).tobytes())


def test_load_pgm(tmp_path):
    p8, p16 = tmp_path / "a.pgm", tmp_path / "b.pgm"
    _write_pgm(p8, np.array([[0, 128], [255, 1]]), 255)
    np.testing.assert_allclose(load_image(p8), np.array([[0, 128], [255, 1]]) / 255)
    _write_pgm(p16, np.array([[0, 1000, 65535]]), 65535)
    np.testing.assert_allclose(load_image(p16), [[0, 1000 / 65535, 1.0]])


def test_load_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(tmp_path / "missing.png")
    bmp = tmp_path / "x.bmp"
    Image.fromarray(np.zeros((2, 2), np.uint8)).save(bmp)
    with pytest.raises(TargetError):
        load_image(bmp)
    ascii_pgm = tmp_path / "x.pgm"
    ascii_pgm.write_bytes(b"P2\n1 1\n255\n0\n")
    with pytest.raises(TargetError):
        load_image(ascii_pgm)
    zero = tmp_path / "z.pgm"
    zero.write_bytes(b"P5\n0 3\n255\n")
    with pytest.raises(TargetError):
        load_image(zero)
    short = tmp_path / "s.pgm"
    short.write_bytes(b"P5\n4 4\n255\n\x00\x00")
    with pytest.raises(TargetError):
        load_image(short)


def test_patterns_in_range():
    for kind in ("amplitude", "phase"):
        img = make_pattern((32, 32), kind)
        assert img.shape == (32, 32) and img.min() >= 0 and img.max() <= 1
    with pytest.raises(ValueError):
        make_pattern((4, 4), "nope")
