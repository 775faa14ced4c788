import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexlat.errors import BoxTooSmallError
from hexlat.oscillatory import kernel_quadrature
from hexlat.propagator import WaveField, kernel_fft, min_box_size, propagate_linear
from hexlat.symbols import GRADIENT_BOUND, HEX, SQUARE


def random_field(rng, n=64, origin=(0, 0)):
    data = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return WaveField(n, data, origin)


@pytest.mark.parametrize("t, n", [(0, 128), (100, 2048), (200, 4096), (1, 256), (10, 512)])
def test_min_box_size(t, n):
    assert min_box_size(t) == n


@given(st.floats(0, 2000, allow_nan=False))
def test_min_box_size_is_smallest_power_of_two(t):
    n = min_box_size(t)
    need = 2 * ((GRADIENT_BOUND + 1) * t + 64)
    assert n & (n - 1) == 0
    assert n >= need
    assert n // 2 < need


def test_wavefield_indexing_and_origin():
    f = WaveField.delta(16, 2.0, site=(-3, 5), origin=(4, 4))
    assert f[(-3, 5)] == 2.0
    assert f.data[1, 9] == 2.0
    l1, l2 = f.site_coords()
    assert (l1[1, 9], l2[1, 9]) == (-3, 5)
    with pytest.raises(ValueError):
        WaveField(8, np.zeros((4, 4)))


def test_binary_round_trip(tmp_path, rng):
    f = random_field(rng, 32, origin=(3, 7))
    f.dump(tmp_path / "f.bin")
    blob = (tmp_path / "f.bin").read_bytes()
    assert blob[:8] == b"HEXLATWF"
    assert len(blob) == 16 + 16 * 32 * 32
    g = WaveField.load(tmp_path / "f.bin")
    for site in [(0, 0), (-5, 3), (15, -16)]:
        assert g[site] == f[site]
    with pytest.raises(ValueError):
        WaveField.from_bytes(b"NOTMAGIC" + blob[8:])


def test_csv_export(tmp_path):
    f = WaveField.delta(8, 0.5 - 0.25j, site=(1, -2))
    f.to_csv(tmp_path / "a.csv", threshold=1e-14)
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines == ["l1,l2,re,im", "1,-2,0.5,-0.25"]
    f.to_csv(tmp_path / "b.csv")
    assert len((tmp_path / "b.csv").read_text().splitlines()) == 65


def test_time_zero_is_identity(rng):
    f = random_field(rng)
    np.testing.assert_array_equal(propagate_linear(f, HEX, 0.0).data, f.data)


@pytest.mark.parametrize("sym", [HEX, SQUARE])
def test_delta_mass(sym):
    for t in (0.3, 7.0, 40.0):
        u = propagate_linear(WaveField.delta(256), sym, t)
        assert abs(u.mass() - 1.0) < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 100), st.integers(0, 2**32 - 1))
def test_unitarity(t, seed):
    f = random_field(np.random.default_rng(seed))
    u = propagate_linear(f, HEX, t)
    assert abs(u.norm() - f.norm()) <= 1e-12 * f.norm()


@settings(max_examples=15, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.integers(0, 2**32 - 1))
def test_group_law_and_reversal(t1, t2, seed):
    f = random_field(np.random.default_rng(seed))
    a = propagate_linear(propagate_linear(f, HEX, t1), HEX, t2)
    b = propagate_linear(f, HEX, t1 + t2)
    assert np.linalg.norm(a.data - b.data) < 1e-11 * f.norm()
    back = propagate_linear(propagate_linear(f, HEX, t1), HEX, -t1)
    assert np.linalg.norm(back.data - f.data) < 1e-11 * f.norm()


def test_kernel_at_time_zero():
    k = kernel_fft(HEX, 128, 0.0)
    assert k[(0, 0)] == pytest.approx(1.0, abs=1e-15)
    a = np.abs(k.array)
    a[0, 0] = 0
    assert a.max() < 1e-15


def test_kernel_mass_and_light_cone():
    k = kernel_fft(HEX, min_box_size(10), 10.0)
    assert abs(k.total_mass() - 1.0) < 1e-10
    k = kernel_fft(HEX, min_box_size(100), 100.0)
    l1, l2, vals = k.centered()
    speed = np.hypot(l1, l2) / 100.0
    outside = speed > GRADIENT_BOUND + 1
    assert outside.any()
    assert np.abs(vals[outside]).max() < 1e-8


def test_kernel_mapping_interface():
    k = kernel_fft(HEX, 256, 2.0)
    assert k.radius == 127
    assert len(k) == 255 * 255
    assert (127, -127) in k
    with pytest.raises(KeyError):
        k[(128, 0)]
    value, where = k.sup()
    assert value == pytest.approx(abs(k[where]))


def test_kernel_box_too_small():
    with pytest.raises(BoxTooSmallError):
        kernel_fft(HEX, 128, 50.0)


def test_kernel_symmetries():
    # g is even and symmetric under x1 <-> x2, so K(l) = K(-l) = K(l2, l1)
    k = kernel_fft(HEX, 512, 12.0)
    for l in [(3, 5), (-7, 2), (10, 10)]:
        assert k[l] == pytest.approx(k[(-l[0], -l[1])], abs=1e-14)
        assert k[l] == pytest.approx(k[(l[1], l[0])], abs=1e-14)


def test_value_at_origin_matches_quadrature():
    n = 256
    u = propagate_linear(WaveField.delta(n), HEX, 1.0)
    assert abs(u[(0, 0)] - kernel_quadrature(HEX, (0, 0), 1.0, m=n)) < 1e-10


def test_fft_equals_quadrature_sum(rng):
    n = 512
    for t in (3.0, 17.5):
        k = kernel_fft(HEX, n, t)
        for _ in range(5):
            l = tuple(int(c) for c in rng.integers(-60, 61, 2))
            assert abs(k[l] - kernel_quadrature(HEX, l, t, m=n)) < 1e-12


def test_threads_do_not_change_results(rng):
    f = random_field(rng, 128)
    a = propagate_linear(f, HEX, 3.3, workers=1).data
    b = propagate_linear(f, HEX, 3.3, workers=8).data
    np.testing.assert_allclose(a, b, atol=1e-12)
