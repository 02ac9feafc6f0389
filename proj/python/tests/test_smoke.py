import math

import pytest

import gks


@pytest.fixture(scope="module")
def params():
    return gks.ModelParams(epsilon=0.2, delta=1.0)


@pytest.fixture(scope="module")
def wave(params):
    return gks.solve_from_hopf(params, omega=0.126)


def test_version():
    assert gks.__version__.count(".") == 2


def test_profile(wave, params):
    assert wave.residual(params) < 1e-10
    assert math.isclose(wave.omega, 0.126, rel_tol=1e-14)
    assert len(wave.coeffs) == 2 * wave.N + 1
    u = wave.sample(64)
    assert len(u) == 64 and max(u) > 0 > min(u)


def test_errors_map_to_exceptions():
    with pytest.raises(gks.GksError, match="no-hopf-point"):
        gks.solve_from_hopf(gks.ModelParams(delta=0.0), omega=0.1)
    with pytest.raises(gks.GksError):
        gks.ModelParams(f=[0.0, 1.0])


def test_spectrum_is_stable_mid_band(wave, params):
    s = gks.bloch_spectrum(wave, params)
    assert s["verdict"]["stable"]
    a = sorted(s["fit"]["a"])
    assert a[0] < 0 < a[1]
    fd = gks.fd_spectrum(wave, params, 0.0, 256)
    assert min(abs(z) for z in fd) < 1e-6


def test_family_and_whitham(wave, params):
    fam = gks.continue_family(wave, params, [-0.01, 0.0, 0.01], [0.1245, 0.126, 0.1275])
    assert fam.converged_count() == 9
    w = gks.whitham_speeds(fam, 1, 1)
    assert w["hyperbolic"]
    s = gks.bloch_spectrum(fam.wave(1, 1), params)
    for speed, a in zip(w["comoving_speeds"], sorted(s["fit"]["a"])):
        assert abs(speed - a) < 1e-2 * abs(a)


def test_round_trip(tmp_path, wave, params):
    gks.save_wave(tmp_path / "w.json", wave, params)
    back, p = gks.load_wave(tmp_path / "w.json")
    assert back.coeffs == wave.coeffs
    assert p.epsilon == params.epsilon


def test_short_evolution(wave, params):
    r = gks.evolve(wave, params, periods=8, T=5.0, n_grid=512, snapshots=5)
    assert len(r["times"]) == len(r["residual_Linf"])
    assert not r["tracking_failures"]
    assert r["residual_Linf"][0] > 0


def test_decay_exponent():
    t = [1.0 + 10.0 * i for i in range(50)]
    y = [(1.0 + s) ** -0.5 for s in t]
    fit = gks.decay_exponent(t, y, 10.0, 500.0)
    assert abs(fit.rate - 0.5) < 1e-12
