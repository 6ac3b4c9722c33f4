import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from radarwave.config import (
    FULL_SCALE_DEFAULTS,
    ConfigError,
    DacBitsError,
    DampingRangeError,
    DesiredPattern,
    DirectionRangeError,
    DuplicateDirectionError,
    EmptyPassbandError,
    NotPowerOfTwoError,
    TooManyDirectionsError,
    build_constellation,
    build_flat_pattern,
    config_from_mapping,
    default_passband,
    load_config,
    make_config,
    parse_config_text,
    validate_config,
)


def test_qpsk_points():
    c = build_constellation(2)
    expected = np.exp(1j * np.array([1, 3, 5, 7]) * np.pi / 4)
    np.testing.assert_allclose(c.points, expected, atol=1e-15)


def test_one_bit_points():
    c = build_constellation(1)
    np.testing.assert_allclose(c.points, [1j, -1j], atol=1e-15)


def test_three_bit_phases_and_gaps():
    c = build_constellation(3)
    phases = np.angle(c.points) % (2 * np.pi)
    np.testing.assert_allclose(phases, np.pi / 8 + np.arange(8) * np.pi / 4, atol=1e-14)
    np.testing.assert_allclose(np.diff(phases), np.pi / 4, atol=1e-14)


@pytest.mark.parametrize("b", [0, 17, -1])
def test_constellation_bits_out_of_range(b):
    with pytest.raises(DacBitsError):
        build_constellation(b)


@given(st.integers(1, 12))
def test_constellation_invariants(b):
    c = build_constellation(b)
    assert c.size == 2**b
    np.testing.assert_allclose(np.abs(c.points), 1.0, atol=1e-15)
    assert abs(np.sum(c.points)) < 1e-12 * c.size
    assert np.all(np.abs(c.points.real) > 1e-9) or b == 1
    assert np.all(np.abs(c.points.imag) > 1e-9) or b == 1
    # off-axis: no point at phase k*pi/2
    ph = np.mod(np.angle(c.points), np.pi / 2)
    assert np.all(np.minimum(ph, np.pi / 2 - ph) > 1e-9) or b == 1
    np.testing.assert_array_equal(c.index_of(c.points), np.arange(c.size))


def test_flat_pattern_blocks():
    cfg = make_config(num_antennas=2, num_samples=8, num_directions=2, passband=(-2, 2))
    d = build_flat_pattern(cfg, 1.0)
    assert d.d.shape == (16,)
    for m in range(-4, 4):
        np.testing.assert_array_equal(d.block(m), [1.0, 1.0] if -2 <= m < 2 else [0.0, 0.0])


def test_flat_pattern_full_band():
    cfg = make_config(num_antennas=1, num_samples=4, num_directions=1, passband=(-2, 2))
    np.testing.assert_array_equal(build_flat_pattern(cfg).d, np.ones(4))


def test_flat_pattern_full_scale_count():
    d = build_flat_pattern(FULL_SCALE_DEFAULTS)
    assert d.d.size == 10240
    assert np.count_nonzero(d.d) == 5120


@given(st.integers(1, 6), st.integers(1, 4), st.data())
def test_flat_pattern_nonzero_count(logt, k, data):
    t = 2**logt
    lo = data.draw(st.integers(-(t // 2), t // 2 - 1))
    hi = data.draw(st.integers(lo + 1, t // 2))
    cfg = make_config(num_antennas=k, num_samples=t, num_directions=k, passband=(lo, hi))
    assert np.count_nonzero(build_flat_pattern(cfg).d) == k * (hi - lo)


def test_full_scale_defaults_valid():
    cfg = validate_config(FULL_SCALE_DEFAULTS)
    assert (cfg.num_antennas, cfg.num_samples, cfg.num_directions, cfg.dac_bits) == (128, 1024, 10, 2)
    assert cfg.alpha == 10 * 1024
    assert cfg.band == (-256, 256)
    assert math.isclose(1 / cfg.sample_interval, 2e9)


def test_validate_idempotent():
    cfg = make_config(num_antennas=8, num_samples=16, num_directions=3)
    assert validate_config(validate_config(cfg)) == cfg


@pytest.mark.parametrize(
    "kw, err",
    [
        (dict(damping=1.0), DampingRangeError),
        (dict(damping=-0.1), DampingRangeError),
        (dict(num_samples=1000), NotPowerOfTwoError),
        (dict(passband=(3, 3)), EmptyPassbandError),
        (dict(passband=(-20, 4)), EmptyPassbandError),
        (dict(directions=(0.5, 0.5)), DuplicateDirectionError),
        (dict(num_antennas=2, num_directions=3), TooManyDirectionsError),
        (dict(directions=(0.0,)), DirectionRangeError),
        (dict(directions=(math.pi,)), DirectionRangeError),
        (dict(dac_bits=0), DacBitsError),
    ],
)
def test_named_validation_errors(kw, err):
    base = dict(num_antennas=8, num_samples=16, num_directions=2)
    base.update(kw)
    with pytest.raises(err):
        make_config(**base)
    assert issubclass(err, ConfigError)


def test_default_passband():
    assert default_passband(1024) == (-256, 256)
    assert default_passband(2) == (-1, 1)


def test_desired_pattern_rejects_negative():
    with pytest.raises(ValueError):
        DesiredPattern.from_array([[-1.0]], 1, 1)
    with pytest.raises(ValueError):
        DesiredPattern.from_array([1.0, 2.0], 1, 1)


def test_parse_config_text_and_aliases(tmp_path):
    text = "# comment\nN = 16\nT = 256  # trailing\nK = 4\nb = 3\nmu = 0.2\n\nf_c = 77e9\nT_s = 0.5e-9\n"
    raw = parse_config_text(text)
    assert raw["num_antennas"] == "16" and raw["damping"] == "0.2"
    path = tmp_path / "a.cfg"
    path.write_text(text)
    cfg = load_config(path)
    assert (cfg.num_antennas, cfg.num_samples, cfg.num_directions, cfg.dac_bits, cfg.damping) == (16, 256, 4, 3, 0.2)


def test_config_degrees_and_overrides(tmp_path):
    path = tmp_path / "a.cfg"
    path.write_text("N = 8\nT = 16\ndirections = 30, 60, 90\npassband = -4, 4\n")
    cfg = load_config(path)
    np.testing.assert_allclose(cfg.directions, np.radians([30, 60, 90]))
    assert cfg.band == (-4, 4)
    cfg2 = load_config(path, {"K": "2", "T": "32"})
    assert cfg2.num_directions == 2 and cfg2.num_samples == 32


def test_config_bad_lines():
    with pytest.raises(ConfigError):
        parse_config_text("N 16\n")
    with pytest.raises(ConfigError):
        config_from_mapping({"bogus": "1"})
    with pytest.raises(ConfigError):
        config_from_mapping({"N": "many"})


def test_sample_rate_key():
    cfg = config_from_mapping({"N": "4", "T": "8", "K": "1", "sample_rate": "2e9"})
    assert math.isclose(cfg.sample_interval, 0.5e-9)
