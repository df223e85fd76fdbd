import numpy as np
import pytest

from modalshunt import (
    AnalogCellConfig,
    BeamConfig,
    ModelError,
    build_analog_network,
    build_beam,
    contiguous_groups,
    solve_modes,
)
from modalshunt.beam import analog_cell_matrices, cell_coupling, hermite_beam_element
from modalshunt.model import is_psd


def test_default_dimensions():
    m = build_beam()
    assert (m.n_dof, m.n_transducers) == (402, 20)
    np.testing.assert_allclose(np.diag(m.capacitance_piezo), 2 * 21.96e-9)


def test_first_flexible_frequency_matches_closed_form():
    cfg = BeamConfig()
    m = build_beam(cfg)
    mb = solve_modes(m.stiffness_sc, m.mass)
    beta_l = 4.730040744862704
    w_ref = (beta_l / cfg.length) ** 2 * np.sqrt(cfg.bending_stiffness / cfg.mass_per_length)
    assert cfg.n_elements == 200
    assert mb.omega[2] == pytest.approx(w_ref, rel=1e-3)


def test_element_matrices_rigid_body_nullspace():
    k, m = hermite_beam_element(2.0, 3.0, 0.4)
    # translation and rotation about the left node
    for v in (np.array([1.0, 0.0, 1.0, 0.0]), np.array([0.0, 1.0, 0.4, 1.0])):
        np.testing.assert_allclose(k @ v, 0.0, atol=1e-12)
    u = np.array([1.0, 0.0, 1.0, 0.0])
    assert u @ m @ u == pytest.approx(3.0 * 0.4)


def test_coupling_columns_are_moment_pairs():
    cfg = BeamConfig(n_cells=4, elements_per_cell=3)
    gam = cell_coupling(cfg)
    np.testing.assert_allclose(gam.sum(axis=0), 0.0)
    assert np.all(gam[0::2] == 0.0)
    assert np.count_nonzero(gam) == 8


def test_grouped_columns_are_sums_of_cell_columns():
    groups = contiguous_groups(20, 2)
    assert groups == (tuple(range(10)), tuple(range(10, 20)))
    full = build_beam()
    grouped = build_beam(BeamConfig(grouping=groups))
    for p, g in enumerate(groups):
        ref = full.coupling[:, list(g)].sum(axis=1)
        np.testing.assert_array_equal(grouped.coupling[:, p], ref)
        assert np.count_nonzero(ref) == 2
        assert grouped.capacitance_piezo[p, p] == pytest.approx(
            full.capacitance_piezo[0, 0] * len(g), rel=1e-15)
    np.testing.assert_array_equal(grouped.mass, full.mass)


def test_config_validation():
    with pytest.raises(ModelError):
        BeamConfig(thickness=0.0)
    with pytest.raises(ModelError):
        BeamConfig(n_cells=3, grouping=[[0, 1], [1, 2]])
    with pytest.raises(ModelError):
        AnalogCellConfig(r=-1.0)


def test_single_analog_cell():
    net = build_analog_network(n_cells=1)
    assert net.n_total == 5 and net.n_ports == 1
    c = net.capacitance
    assert np.count_nonzero(c) == 1 and c[0, 0] == 2 * 21.96e-9


def test_analog_cell_vectors_as_printed():
    cfg = AnalogCellConfig(cp=1.0, r=2.0, l=4.0, a=3.0)
    c, g, b = analog_cell_matrices(cfg)
    v1 = np.array([-3.0, 1.0, -1.0, 0.0, 0.0])
    v2 = np.array([0.0, 0.0, -1.0, 3.0, 1.0])
    np.testing.assert_allclose(g, (np.outer(v1, v1) + np.outer(v2, v2)) / 2.0)
    np.testing.assert_allclose(b[[0, 3]][:, [0, 3]], [[0.25, -0.25], [-0.25, 0.25]])
    assert c[2, 2] == 2.0


def test_two_cell_hand_assembly():
    cfg = AnalogCellConfig(cp=1.0, r=1.0, l=1.0, a=2.0)
    net = build_analog_network(cfg, 2)
    _, gc, _ = analog_cell_matrices(cfg)
    # global dofs: ports 0, 1; boundary nodes 2..7; cell 0 -> [2, 3, 0, 4, 5], cell 1 -> [4, 5, 1, 6, 7]
    g = np.zeros((8, 8))
    for dofs in ([2, 3, 0, 4, 5], [4, 5, 1, 6, 7]):
        g[np.ix_(dofs, dofs)] += gc
    np.testing.assert_array_equal(net.conductance, g)
    # shared dof 4: right-boundary of cell 0 plus left-boundary of cell 1
    assert net.conductance[4, 4] == gc[3, 3] + gc[0, 0]
    assert net.n_total == 8


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_analog_matrices_psd(a):
    net = build_analog_network(AnalogCellConfig(a=a), 20)
    assert net.n_total == 62
    for mat in (net.capacitance, net.conductance, net.reluctance):
        assert is_psd(mat)
        np.testing.assert_array_equal(mat, mat.T)
