import numpy as np
import pytest

from wigner_lab import dmfit, dynamics
from wigner_lab import experiments as ex
from wigner_lab.wigner import GridSpec


def test_states():
    assert np.allclose(np.abs(ex.zero_l_state(3, 6)) ** 2, [0.5, 0, 0, 0.5, 0, 0])
    assert np.allclose(np.abs(ex.flat_state(5, 6)) ** 2, [0.2] * 5 + [0])


def test_population_variance_of_poisson():
    from wigner_lab.fockspace import poisson_populations

    assert ex.population_variance(poisson_populations(1.5, 60)) == pytest.approx(2.25)


def test_strong_decoherence_raises_errors():
    fit = dmfit.FitConfig()
    clean = ex.tomography_pipeline(ex.zero_l_state(4), dynamics.SystemParams.from_mhz(20.0, 30), fit, l=4)
    noisy_params = dynamics.SystemParams.from_mhz(20.0, 30, t1=150.0, t2=200.0)
    noisy = ex.tomography_pipeline(ex.zero_l_state(4), noisy_params, fit, decoherence=True, l=4)
    assert noisy.fidelity_error > clean.fidelity_error
    assert noisy.phase_dt == pytest.approx(1.6)


def test_phase_correction_window_default_is_near_optimal():
    params = dynamics.SystemParams.from_mhz(20.0, 30)
    fit = dmfit.FitConfig()
    errs = {dt: ex.tomography_pipeline(ex.zero_l_state(3), params, fit, l=3, phase_dt=dt).errors.phase_error_0l
            for dt in (0.0, 1.6, 3.2)}
    assert errs[1.6] < errs[0.0] and errs[1.6] < errs[3.2]


def test_correlation_deviation_zero_without_anharmonicity():
    spec = GridSpec.square(2.0, 9)
    dev = ex.correlation_deviation(ex.zero_l_state(2), dynamics.SystemParams(0.0, 45), spec)
    assert dev == pytest.approx(0.0, abs=1e-6)
    assert ex.monotone_violations([1, 2, 1.5, 3]) == 1


def test_frame_phase_and_recovery_fit():
    env = dynamics.chirp_envelope(0.4, 0.32, -0.05, 20.0)
    ph = ex.frame_phase(env, [0.0, 20.0, 30.0], -0.05)
    assert ph[0] == 0.0
    assert ph[1] == pytest.approx(2 * np.pi * 0.5 * (0.32 - 0.05) * 20.0)
    assert ph[2] - ph[1] == pytest.approx(2 * np.pi * -0.05 * 10.0)
    t = np.linspace(0.0, 500.0, 101)
    assert ex.fit_recovery_time(t, 1 - 0.4 * np.exp(-t / 90.0), 0.0, 500.0) == pytest.approx(90.0)
    with pytest.raises(ValueError):
        ex.fit_recovery_time(t, 1 - 0.4 * np.exp(t / 90.0) * 1e-3, 0.0, 500.0)
