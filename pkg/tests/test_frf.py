import numpy as np
import pytest
from scipy.integrate import solve_ivp

from helpers import block_solve_frf, random_model
from modalshunt import (
    ElectricalNetwork,
    FrfResult,
    ModelError,
    NumericalError,
    PiezoStructureModel,
    SweepConfig,
    SynthesisConfig,
    attenuation,
    band_local_maxima,
    band_peak,
    build_beam,
    coupled_frf,
    frequency_grid,
    read_frf_csv,
    sdof_demo,
    sdof_model,
    sdof_shunt,
    sdof_sweep,
    solve_modes,
    synthesize,
    write_frf_csv,
)
from modalshunt.frf import POLE_CLEARANCE


def test_short_circuit_sdof_closed_form():
    model = PiezoStructureModel([[2.0]], [[8.0]], [[0.1]], [[1.0]])
    sweep = SweepConfig(0.05, 1.0, 50, "linear", quantity="displacement")
    frf = coupled_frf(model, None, sweep)
    w = 2 * np.pi * frf.freq_hz
    np.testing.assert_allclose(frf.response, 1 / (8.0 - 2.0 * w**2), rtol=1e-12)
    vel = coupled_frf(model, None, SweepConfig(0.05, 1.0, 50, "linear"))
    np.testing.assert_allclose(vel.response, 1j * w / (8.0 - 2.0 * w**2), rtol=1e-12)


def _random_coupled(seed, n=7, p=3, targets=(0, 2, 4, 5)):
    rng = np.random.default_rng(seed)
    model = random_model(rng, n, p)
    mech = solve_modes(model.stiffness_sc, model.mass)
    net = synthesize(model, mech, SynthesisConfig(targets)).network
    return model, mech, net


def test_reciprocity():
    model, mech, net = _random_coupled(1)
    grid = np.geomspace(0.5 * mech.freq_hz[0], 1.5 * mech.freq_hz[-1], 150)
    ab = coupled_frf(model, net, SweepConfig(1e-3, 1e3, input_dof=1, output_dof=5), grid, mech)
    ba = coupled_frf(model, net, SweepConfig(1e-3, 1e3, input_dof=5, output_dof=1), grid, mech)
    np.testing.assert_allclose(ab.response, ba.response, rtol=1e-9)


@pytest.mark.parametrize("zeta", [0.0, 0.03])
def test_modal_direct_and_block_solve_agree(zeta):
    model, mech, net = _random_coupled(2)
    sweep = SweepConfig(0.5 * mech.freq_hz[0], 1.5 * mech.freq_hz[-1], 120, mech_damping=zeta,
                        input_dof=0, output_dof=3)
    grid = frequency_grid(sweep, avoid_hz=mech.freq_hz)
    h_modal = coupled_frf(model, net, sweep, grid, mech).response
    h_direct = coupled_frf(model, net, sweep, grid, mech, method="direct").response
    ref = block_solve_frf(model, net, grid, 0, 3, zeta=zeta)
    scale = np.abs(ref).max()
    assert np.abs(h_modal - ref).max() / scale < 1e-9
    assert np.abs(h_direct - ref).max() / scale < 1e-9


def test_two_dof_block_solve_oracle():
    model = PiezoStructureModel(np.diag([1.0, 2.0]), [[3.0, -1.0], [-1.0, 1.0]],
                                [[0.05], [-0.05]], [[0.01]])
    mech = solve_modes(model.stiffness_sc, model.mass)
    net = synthesize(model, mech, SynthesisConfig((0, 1))).network
    grid = np.linspace(0.02, 0.5, 200)
    sweep = SweepConfig(0.02, 0.5, input_dof=0, output_dof=1)
    h = coupled_frf(model, net, sweep, grid, mech).response
    ref = block_solve_frf(model, net, grid, 0, 1)
    np.testing.assert_allclose(h, ref, rtol=1e-9)


def test_grid_clears_poles_and_densifies():
    sweep = SweepConfig(10.0, 100.0, 91, "linear")
    grid = frequency_grid(sweep, resonances_hz=(50.0,), avoid_hz=(50.0, 20.0))
    assert np.all(np.abs(grid - 50.0) >= POLE_CLEARANCE * 50.0)
    assert np.all(np.abs(grid - 20.0) >= POLE_CLEARANCE * 20.0)
    assert np.sum((grid > 47.5) & (grid < 52.5)) >= 200
    assert np.all(np.diff(grid) > 0) and grid[0] >= 10.0 and grid[-1] <= 100.0


def test_sweep_validation():
    for bad in (dict(f_min=0.0, f_max=1.0), dict(f_min=2.0, f_max=1.0),
                dict(f_min=1.0, f_max=2.0, n_points=1), dict(f_min=1.0, f_max=2.0, spacing="x"),
                dict(f_min=1.0, f_max=2.0, mech_damping=-0.1),
                dict(f_min=1.0, f_max=2.0, quantity="force")):
        with pytest.raises(ModelError):
            SweepConfig(**bad)


def test_port_count_mismatch():
    model, mech, net = _random_coupled(3)
    other = random_model(np.random.default_rng(0), 4, 2)
    with pytest.raises(ModelError):
        coupled_frf(other, net, SweepConfig(1.0, 2.0))


def test_singular_network_point_is_skipped():
    # Y(jw) = j (w - w0^2 / w) vanishes at w = w0
    model = PiezoStructureModel([[1.0]], [[4.0]], [[0.1]], [[1.0]])
    w0 = 3.0
    net = ElectricalNetwork([[1.0]], [[0.0]], [[w0**2]], [[1.0]])
    f0 = w0 / (2 * np.pi)
    grid = np.array([0.5 * f0, f0, 1.5 * f0])
    frf = coupled_frf(model, net, SweepConfig(0.1, 1.0), grid)
    assert frf.metadata["skipped_hz"] == [f0]
    assert frf.freq_hz.size == 2
    empty = ElectricalNetwork([[0.0]], [[0.0]], [[0.0]], [[1.0]])
    with pytest.raises(NumericalError):
        coupled_frf(model, empty, SweepConfig(0.1, 1.0), grid)


def test_sdof_weak_coupling_limit():
    w, cp = 2 * np.pi * 100, 1e-8
    sweep = sdof_sweep(w)
    grid = np.concatenate([np.linspace(55, 85, 30), np.linspace(115, 145, 30)])
    base = coupled_frf(sdof_model(1e-4, w, cp), None, sweep, grid).response
    weak = sdof_demo(1e-4, w, cp, sweep, grid).response
    np.testing.assert_allclose(weak, base, rtol=1e-6)


def test_sdof_twin_peaks_below_short_circuit():
    w, cp = 2 * np.pi * 100, 21.96e-9
    sweep = sdof_sweep(w)
    grid = frequency_grid(sweep, (100.0,), (100.0,))
    frf = sdof_demo(0.1, w, cp, sweep, grid)
    base = coupled_frf(sdof_model(0.1, w, cp), None, sweep, grid)
    f, a = band_local_maxima(frf, (50.0, 150.0))
    assert len(f) == 2 and f[0] < 100.0 < f[1]
    assert abs(a[0] - a[1]) / a.max() < 0.1
    assert a.max() < band_peak(base, (50.0, 150.0))
    with pytest.raises(ModelError):
        sdof_demo(1.0, w, cp)


def test_sdof_time_integration_oracle():
    # parallel RL shunt: x'' + k x + g psi' = f, cp psi'' + G psi' + B psi - g x' = 0
    kc, w0, cp = 0.1, 1.0, 1.0
    model = sdof_model(kc, w0, cp)
    net = sdof_shunt(kc, w0, cp)
    k = model.stiffness_sc[0, 0]
    gam = model.coupling[0, 0]
    g, b = net.conductance[0, 0], net.reluctance[0, 0]
    drive = 0.97

    def rhs(t, y):
        x, v, psi, dpsi = y
        return [v, np.sin(drive * t) - k * x - gam * dpsi,
                dpsi, (gam * v - g * dpsi - b * psi) / cp]

    period = 2 * np.pi / drive
    t_end = 500 * period
    t_eval = np.linspace(t_end - 5 * period, t_end, 2000)
    sol = solve_ivp(rhs, (0.0, t_end), [0.0, 0.0, 0.0, 0.0], method="DOP853",
                    rtol=1e-9, atol=1e-12, t_eval=t_eval)
    amp = np.abs(sol.y[1]).max()
    frf = sdof_demo(kc, w0, cp, freq_hz=[drive / (2 * np.pi)])
    assert amp == pytest.approx(abs(frf.response[0]), rel=0.01)


def test_attenuation_trivial_cases():
    f = np.linspace(1, 10, 50)
    base = FrfResult(f, np.sin(f) + 2j)
    assert attenuation(base, base, [(2, 5), (6, 9)]) == [0.0, 0.0]
    tenth = FrfResult(f, base.response / 10)
    np.testing.assert_allclose(attenuation(base, tenth, [(2, 5)]), [20.0])
    with pytest.raises(ModelError):
        attenuation(base, tenth, [(20, 30)])
    with pytest.raises(ModelError):
        attenuation(base, FrfResult(f[:-1], tenth.response[:-1]), [(2, 5)])


def test_csv_round_trip_is_exact(tmp_path):
    frf = sdof_demo(0.05, 2 * np.pi * 100, 21.96e-9)
    write_frf_csv(frf, tmp_path / "frf.csv")
    back = read_frf_csv(tmp_path / "frf.csv")
    assert np.array_equal(back.freq_hz, frf.freq_hz)
    assert np.array_equal(back.response, frf.response)
    assert back.metadata["quantity"] == "velocity"
    header = [ln for ln in (tmp_path / "frf.csv").read_text().splitlines()
              if not ln.startswith("#")][0]
    assert header == "freq_hz,re,im,abs"


def test_damped_network_never_worse_than_short_circuit():
    model = build_beam()
    mech = solve_modes(model.stiffness_sc, model.mass)
    targets = tuple(int(i) for i in mech.flexible_indices[:4])
    net = synthesize(model, mech, SynthesisConfig(targets)).network
    sweep = SweepConfig(10.0, 700.0, 1500, mech_damping=0.01, output_dof=-2)
    fr = mech.freq_hz[list(targets)]
    grid = frequency_grid(sweep, fr, mech.freq_hz[~mech.rigid])
    base = coupled_frf(model, None, sweep, grid, mech)
    damped = coupled_frf(model, net, sweep, grid, mech)
    for f in fr:
        band = (0.85 * f, 1.15 * f)
        assert band_peak(damped, band) <= band_peak(base, band)
