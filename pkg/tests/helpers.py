"""Random instances and independent oracles shared by the test modules."""

import numpy as np
import scipy.linalg as la

from modalshunt import PiezoStructureModel, solve_modes


def random_spd(rng, n, cond=10.0, scale=1.0):
    """SPD matrix with eigenvalues spread over ``[1, cond] * scale``."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    w = np.geomspace(1.0, cond, n) if n > 1 else np.ones(1)
    return scale * (q * rng.permutation(w)) @ q.T


def random_model(rng, n, p, kmax=0.3, scalar_cp=False):
    """
    Random coupled model with PD stiffness, non-identical transducers and
    coupling scaled so that the largest single-mode EEMCF is ``kmax``.
    """
    m = random_spd(rng, n, cond=5.0)
    k = random_spd(rng, n, cond=100.0, scale=10.0)
    cp = np.eye(p) * 2e-8 if scalar_cp else random_spd(rng, p, cond=4.0, scale=1e-8)
    gam = rng.standard_normal((n, p))
    mech = solve_modes(k, m)
    cp_isqrt = la.inv(la.sqrtm(cp)).real
    kr = np.linalg.norm(cp_isqrt @ gam.T @ mech.shapes, axis=0) / mech.omega
    gam *= kmax / kr.max()
    return PiezoStructureModel(m, k, gam, cp, name="random")


def chain_model(n_mass=3, kc=0.1):
    """Fixed-free spring-mass chain with one transducer across the first spring."""
    m = np.eye(n_mass)
    k = np.zeros((n_mass, n_mass))
    for i in range(n_mass):
        k[i, i] += 1.0
        if i + 1 < n_mass:
            k[i:i + 2, i:i + 2] += np.array([[1.0, -1.0], [-1.0, 1.0]])
    gam = np.zeros((n_mass, 1))
    gam[0, 0] = kc
    return PiezoStructureModel(m, k, gam, [[1.0]], name=f"chain{n_mass}")


def block_solve_frf(model, net, freq_hz, i_in, i_out, zeta=0.0, quantity="velocity"):
    """
    Oracle: solve the full unreduced coupled system

        [ M s^2 + D s + K    s Gamma E^T ] [x  ]   [f]
        [ -E Gamma^T         Y(s)        ] [psi] = [0]

    with dense LU at every frequency.
    """
    n = model.n_dof
    ne = net.n_total
    mech = solve_modes(model.stiffness_sc, model.mass)
    mphi = model.mass @ mech.shapes
    damp = (mphi * (2 * zeta * mech.omega)) @ mphi.T
    ge = model.coupling @ net.localization.T
    rhs = np.zeros(n + ne, dtype=complex)
    rhs[i_in] = 1.0
    out = []
    for f in freq_hz:
        s = 2j * np.pi * f
        a = np.zeros((n + ne, n + ne), dtype=complex)
        a[:n, :n] = model.mass * s * s + damp * s + model.stiffness_sc
        a[:n, n:] = s * ge
        a[n:, :n] = -ge.T
        a[n:, n:] = s * net.capacitance + net.conductance + net.reluctance / s
        x = np.linalg.solve(a, rhs)[i_out]
        out.append(x * s if quantity == "velocity" else x)
    return np.array(out)
