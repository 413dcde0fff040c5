import numpy as np
import pytest

from bnls import fieldio as fio
from bnls import spectral as sp


def test_header_is_64_bytes(tmp_path):
    g = sp.make_grid(1, 16.0, 256)
    f = sp.zero_field(g)
    path = tmp_path / "z.fld"
    fio.write_field(path, f)
    assert path.stat().st_size == 64 + 2 * 8 * 256
    assert path.read_bytes()[:8] == fio.MAGIC


def test_round_trip_bitwise(tmp_path, rng=np.random.default_rng(5)):
    g = sp.make_grid(1, 16.0, 256)
    vals = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    f = sp.Field(g, vals)
    path = tmp_path / "f.fld"
    fio.write_field(path, f)
    back = fio.read_field(path)
    assert back.grid == g
    assert back.space == sp.PHYSICAL
    assert np.array_equal(back.values, f.values)


def test_round_trip_fourier_space_2d(tmp_path, rng=np.random.default_rng(6)):
    g = sp.make_grid(2, 8.0, 32)
    vals = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
    f = sp.Field(g, vals, sp.FOURIER)
    path = tmp_path / "f2.fld"
    fio.write_field(path, f)
    back = fio.read_field(path)
    assert back.grid == g
    assert back.space == sp.FOURIER
    assert np.array_equal(back.values, f.values)


def test_norms_stable_across_round_trip(tmp_path):
    g = sp.make_grid(1, 16.0, 256)
    f = sp.field_from_function(g, lambda x: np.exp(-x**2 / 2) * (1 + 0.3j))
    path = tmp_path / "g.fld"
    fio.write_field(path, f)
    back = fio.read_field(path)
    spec = sp.SobolevSpec(1.0)
    assert sp.sobolev_norm(back, spec) == sp.sobolev_norm(f, spec)
    assert sp.lq_norm(back, 2) == sp.lq_norm(f, 2)


def test_truncated_file_rejected(tmp_path):
    path = tmp_path / "bad.fld"
    path.write_bytes(b"short")
    with pytest.raises(ValueError):
        fio.read_field(path)


def test_bad_magic_rejected(tmp_path):
    g = sp.make_grid(1, 16.0, 256)
    path = tmp_path / "m.fld"
    fio.write_field(path, sp.zero_field(g))
    raw = bytearray(path.read_bytes())
    raw[:8] = b"NOTAFLD0"
    path.write_bytes(bytes(raw))
    with pytest.raises(ValueError):
        fio.read_field(path)


def test_payload_size_mismatch_rejected(tmp_path):
    g = sp.make_grid(1, 16.0, 256)
    path = tmp_path / "p.fld"
    fio.write_field(path, sp.zero_field(g))
    raw = path.read_bytes()
    path.write_bytes(raw[:-16])
    with pytest.raises(ValueError):
        fio.read_field(path)
