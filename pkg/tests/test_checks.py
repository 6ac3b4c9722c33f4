from radarwave.checks import run_checks
from radarwave.config import make_config


def test_checks_pass_on_desk_config():
    results = run_checks(make_config(num_antennas=16, num_samples=256, num_directions=4))
    assert all(r.passed for r in results), [r.line() for r in results if not r.passed]
    assert {r.name for r in results} >= {"adjoint", "dense-vs-fast", "constellation"}


def test_corrupted_sign_fails_adjoint():
    results = {r.name: r for r in run_checks(make_config(num_antennas=4, num_samples=16, num_directions=2), corrupt_dft_sign=True)}
    assert not results["adjoint"].passed
    assert results["output function vs grid"].passed


def test_one_bit_constellation_check():
    results = {r.name: r for r in run_checks(make_config(num_antennas=4, num_samples=16, num_directions=2, dac_bits=1))}
    assert results["constellation"].passed and "2 points" in results["constellation"].detail
    assert all(r.passed for r in results.values())
