"""
Generalized eigenproblems, modal coupling coefficients and MAC matrices.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .model import TOL_PSD, ModalBasis, ModelError


@dataclass(frozen=True)
class CouplingTable:
    """
    Modal coupling between targeted mechanical modes (rows) and electrical
    modes (columns).

    ``gamma[r, k]`` is the modal electromechanical coupling coefficient and
    ``eemcf[r, k] = |gamma[r, k]| / omega_sc[r]`` the corresponding modal
    effective electromechanical coupling factor.
    """

    gamma: np.ndarray
    eemcf: np.ndarray
    targeted: tuple


def _fix_signs(phi):
    # largest-magnitude entry of each column made positive
    idx = np.argmax(np.abs(phi), axis=0)
    signs = np.sign(phi[idx, np.arange(phi.shape[1])])
    signs[signs == 0] = 1.0
    return phi * signs


def solve_modes(stiffness, metric, normalization="mass"):
    """
    Solve ``K phi = M phi omega^2`` for the full set of modes.

    The metric is Cholesky-factored and the problem reduced to a standard
    symmetric one, then back-transformed, so the returned shapes satisfy
    ``Phi^T M Phi = I`` and ``Phi^T K Phi = diag(omega_sq)``.

    Parameters
    ----------
    stiffness : (n, n) array_like
        Symmetric positive-semidefinite "stiffness" (``K_sc`` or ``B``).
    metric : (n, n) array_like
        Symmetric positive-definite "mass" (``M`` or ``C``).
    normalization : {"mass", "capacitance"}
        Tag stored on the returned basis.

    Returns
    -------
    ModalBasis
        Modes sorted by ascending ``omega_sq``. Eigenvalues that are
        negative only through round-off (at most ``TOL_PSD`` times the
        largest) are clipped to zero.
    """
    k = np.asarray(stiffness, dtype=float)
    m = np.asarray(metric, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape != m.shape:
        raise ModelError(f"stiffness {k.shape} and metric {m.shape} must be square and equal")
    try:
        low = la.cholesky(m, lower=True)
    except la.LinAlgError:
        raise ModelError("metric matrix is not positive definite") from None
    a = la.solve_triangular(low, k, lower=True)
    a = la.solve_triangular(low, a.T, lower=True)
    a = 0.5 * (a + a.T)
    w2, v = la.eigh(a)
    top = max(abs(w2[-1]), abs(w2[0]))
    if w2[0] < -TOL_PSD * top:
        raise ModelError(f"stiffness is indefinite (eigenvalue {w2[0]:.3e})")
    w2 = np.clip(w2, 0.0, None)
    phi = la.solve_triangular(low.T, v, lower=False)
    return ModalBasis(_fix_signs(phi), w2, normalization)


def orthogonality_residuals(basis, stiffness, metric):
    """Max-norm residuals of ``Phi^T M Phi - I`` and ``Phi^T K Phi - diag(w2)``."""
    phi = basis.shapes
    r_m = phi.T @ metric @ phi - np.eye(basis.n_modes)
    r_k = phi.T @ stiffness @ phi - np.diag(basis.omega_sq)
    return float(np.abs(r_m).max()), float(np.abs(r_k).max())


def coupling_coefficients(model, mech, net, elec, targeted):
    """
    Modal coupling coefficients and EEMCFs between mechanical and electrical
    modes.

    Parameters
    ----------
    model : PiezoStructureModel
    mech : ModalBasis
        Mass-normalized mechanical basis of ``model``.
    net : ElectricalNetwork
        Supplies the port localization.
    elec : ModalBasis
        Capacitance-normalized electrical basis (all of its columns are used).
    targeted : sequence of int
        Mechanical mode indices (rows of the table).
    """
    if mech.normalization != "mass":
        raise ModelError("mechanical basis must be mass-normalized")
    if elec.normalization != "capacitance":
        raise ModelError("electrical basis must be capacitance-normalized")
    targeted = tuple(int(r) for r in targeted)
    phi_sc = mech.shapes[:, targeted]
    gamma = phi_sc.T @ model.coupling @ net.localization.T @ elec.shapes
    w_sc = mech.omega[list(targeted)]
    if np.any(mech.rigid[list(targeted)]):
        raise ModelError("EEMCF is undefined for rigid-body modes")
    eemcf = np.abs(gamma) / w_sc[:, None]
    return CouplingTable(gamma, eemcf, targeted)


def auto_mac(shapes):
    """
    Modal assurance criterion of a set of column vectors against itself.

    ``MAC[i, j] = |phi_i . phi_j|^2 / (|phi_i|^2 |phi_j|^2)``
    """
    phi = np.atleast_2d(np.asarray(shapes, dtype=float))
    if phi.shape[1] < 1:
        raise ModelError("need at least one column")
    nrm = np.einsum("ij,ij->j", phi, phi)
    if np.any(nrm == 0.0):
        raise ModelError("zero-norm column in MAC input")
    cross = phi.T @ phi
    mac = cross**2 / np.outer(nrm, nrm)
    np.fill_diagonal(mac, 1.0)
    return np.clip(mac, 0.0, 1.0)


def open_short_eemcf(model, mech=None):
    """
    EEMCF of every mode from the short- and open-circuit frequencies.

    ``K_r^2 = (w_oc,r^2 - w_sc,r^2) / w_sc,r^2``, with the open-circuit
    stiffness ``K_sc + Gamma Cp^-1 Gamma^T``. Rigid modes get ``nan``.

    Returns
    -------
    eemcf : 1d ndarray
    mech : ModalBasis
        Short-circuit basis (computed if not given).
    """
    if mech is None:
        mech = solve_modes(model.stiffness_sc, model.mass)
    w2_oc = la.eigh(model.stiffness_oc(), model.mass, eigvals_only=True)
    w2_sc = mech.omega_sq
    out = np.full(w2_sc.shape, np.nan)
    flex = ~mech.rigid
    out[flex] = np.sqrt(np.clip(w2_oc[flex] - w2_sc[flex], 0.0, None) / w2_sc[flex])
    return out, mech


def conductance_offdiag_residual(basis, conductance):
    """
    Largest off-diagonal entry of ``Phi^T G Phi`` relative to its diagonal.

    Synthesized networks diagonalize ``G`` together with ``C`` and ``B`` by
    construction; an assembled network need not, so this is reported rather
    than assumed.
    """
    g = basis.shapes.T @ np.asarray(conductance, dtype=float) @ basis.shapes
    diag = np.abs(np.diag(g)).max()
    off = np.abs(g - np.diag(np.diag(g))).max() if g.shape[0] > 1 else 0.0
    return float(off / diag) if diag > 0 else float(off)
