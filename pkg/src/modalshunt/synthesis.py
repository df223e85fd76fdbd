"""
Modal-based synthesis of passive multi-port shunt networks.

The pipeline, for a set of targeted mechanical modes:

1. the optimal dimensionless electrical mode shape at the transducers for
   each mode taken alone (unit norm, aligned with the modal strain seen
   through ``Cp^-1/2``),
2. relative scaling factors and a global scale ``alpha`` that puts the
   set on the passivity bound ``I - Phibar D^2 Phibar^T >= 0``,
3. electrical frequencies and damping ratios from Yamada's rules applied
   to each mechanical/electrical mode pair,
4. inversion of the modal orthogonality relations into ``C``, ``G`` and
   ``B``, completing the mode-shape matrix with internal dofs when there
   are fewer ports than targets, or with extra zero-frequency modes when
   there are more.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la

from .model import (
    TOL_PSD,
    ElectricalNetwork,
    ModalBasis,
    ModelError,
    SingularModeShapeError,
    SynthesisError,
    UncontrollableModeError,
    min_eig,
    norm2,
    port_localization,
)

# beyond this the identity-padded mode-shape matrix is treated as singular
MAX_CONDITION = 1e12
# relative threshold on |Gamma_p^T phi_r| below which a mode is uncontrollable
UNCONTROLLABLE_TOL = 1e-12


@dataclass(frozen=True)
class ModeShapeSet:
    """
    Scaled electrical mode shapes at the transducer ports.

    ``dimensionless`` holds the unit-norm single-mode optima (P x Ns);
    ``capacitance_normalized`` is
    ``Cp^-1/2 @ dimensionless @ diag(alpha * scaling)``.
    """

    dimensionless: np.ndarray
    capacitance_normalized: np.ndarray
    alpha: float
    scaling: np.ndarray

    @property
    def effective_scaling(self):
        """Actual scaling factors ``alpha * relative_scaling``."""
        return self.alpha * self.scaling

    @property
    def bound_eigenvalue(self):
        """``lambda_max`` of the scaled dimensionless shapes' Gram-type matrix."""
        phibar = self.dimensionless * self.effective_scaling
        return float(la.eigvalsh(phibar @ phibar.T)[-1])


@dataclass(frozen=True)
class ModalTuning:
    """Electrical squared frequencies and damping ratios, one per target."""

    omega_e_sq: np.ndarray
    zeta_e: np.ndarray


@dataclass(frozen=True)
class Synthesis:
    """
    Result of :func:`synthesize`.

    Attributes
    ----------
    network : ElectricalNetwork
    shapes : ModeShapeSet
    tuning : ModalTuning
    electrical_modes : ModalBasis
        Targeted electrical modes over all network dofs (capacitance
        normalized, damping ratios attached).
    eemcf : ndarray
        Modal EEMCF of each mechanical/electrical pair.
    condition_number : float
        Condition number of the completed square mode-shape matrix.
    complement : ndarray or None
        Orthonormal basis of the non-targeted port directions when there are
        more ports than targets (in whitened coordinates for the
        ``"whitened"`` policy).
    beta : float or None
        Capacitance assigned to the complement (``D_V = beta I``) for the
        ``"kernel"`` policy, or its equivalent for identical transducers.
    """

    network: ElectricalNetwork
    shapes: ModeShapeSet
    tuning: ModalTuning
    electrical_modes: ModalBasis
    eemcf: np.ndarray
    condition_number: float
    complement: Optional[np.ndarray] = None
    beta: Optional[float] = None


def sym_power(a, p):
    """``a**p`` for a symmetric positive-definite matrix via eigendecomposition."""
    w, v = la.eigh(a)
    if w[0] <= 0:
        raise ModelError("matrix power needs a positive-definite matrix")
    out = (v * w**p) @ v.T
    return 0.5 * (out + out.T)


def _symmetrize(a):
    return 0.5 * (a + a.T)


def _check_target(model, mech, r):
    if not 0 <= r < mech.n_modes:
        raise ModelError(f"mode index {r} out of range (0..{mech.n_modes - 1})")
    if mech.rigid[r]:
        raise UncontrollableModeError(
            f"mode {r} is a rigid-body mode (uncontrollable/rigid mode)"
        )
    strain = model.coupling.T @ mech.shapes[:, r]
    if np.linalg.norm(strain) < UNCONTROLLABLE_TOL * norm2(model.coupling):
        raise UncontrollableModeError(
            f"mode {r} has no coupling with the transducers (uncontrollable/rigid mode)"
        )
    return strain


def optimal_shape_single(model, mech, r):
    """
    Electrical mode shape at the ports maximizing coupling with mode ``r``.

    Returns
    -------
    dimensionless : (P,) ndarray
        Unit-norm maximizer of ``phi_r^T Gamma Cp^-1/2 v`` over ``|v| <= 1``.
    capacitance_normalized : (P,) ndarray
        ``Cp^-1/2 @ dimensionless``.
    """
    strain = _check_target(model, mech, r)
    cp_isqrt = sym_power(model.capacitance_piezo, -0.5)
    direction = cp_isqrt @ strain
    phibar = direction / np.linalg.norm(direction)
    return phibar, cp_isqrt @ phibar


def scale_shapes(singles, cfg, cap_piezo):
    """
    Scale single-mode optima so that the set sits on the passivity bound.

    ``alpha = f / sqrt(lambda_max(Phibar* Dbar^2 Phibar*^T))`` with ``f =
    cfg.alpha_fraction``.
    """
    singles = np.atleast_2d(np.asarray(singles, dtype=float))
    if singles.shape[1] != cfg.n_targets:
        raise ModelError("one single-mode shape per target is required")
    norms = np.linalg.norm(singles, axis=0)
    if not np.allclose(norms, 1.0, rtol=0, atol=1e-10):
        raise ModelError("single-mode shapes must have unit norm")
    dbar = np.asarray(cfg.relative_scaling, dtype=float)
    scaled = singles * dbar
    lam = la.eigvalsh(scaled @ scaled.T)[-1]
    if not lam > 0:
        raise ModelError("scaled mode shapes vanish")
    alpha = cfg.alpha_fraction / np.sqrt(lam)
    cp_isqrt = sym_power(np.atleast_2d(cap_piezo), -0.5)
    phi_p = cp_isqrt @ singles * (alpha * dbar)
    return ModeShapeSet(singles, phi_p, float(alpha), dbar)


def yamada_sdof(kc_sq, omega_sc, cp):
    """
    Reluctance and conductance of a parallel RL shunt (Yamada's rules).

    ``B = (2 - Kc^2) w_sc^2 Cp / 2`` and ``G = sqrt(3 Kc^2 / 2) w_sc Cp``.
    """
    if not 0.0 <= kc_sq < 2.0:
        raise ModelError(f"kc_sq must lie in [0, 2), got {kc_sq}")
    b = (2.0 - kc_sq) * omega_sc**2 * cp / 2.0
    g = np.sqrt(1.5 * kc_sq) * omega_sc * cp
    return b, g


def modal_tuning(eemcf, omega_sc):
    """Electrical frequencies and damping ratios for each targeted pair."""
    k = np.atleast_1d(np.asarray(eemcf, dtype=float))
    w = np.atleast_1d(np.asarray(omega_sc, dtype=float))
    if k.shape != w.shape:
        raise ModelError("eemcf and omega_sc must have the same length")
    if np.any(k < 0) or np.any(k >= np.sqrt(2.0)):
        raise ModelError("modal EEMCF must lie in [0, sqrt(2))")
    k2 = k * k
    omega_e_sq = (2.0 - k2) * w**2 / 2.0
    zeta_e = np.sqrt(3.0) / 2.0 * np.sqrt(k2 / (2.0 - k2))
    return ModalTuning(omega_e_sq, zeta_e)


def _internal_shapes(phi_p, policy, seed):
    """
    Rows completing ``phi_p`` (P x Ns, P < Ns) into a square matrix.

    ``"identity-pad"`` puts a single nonzero per row on the columns left
    over by a pivoted QR of ``phi_p``. ``"random-orthogonal"`` draws a
    random rotation of an orthonormal basis of the null space of ``phi_p``,
    adds a random mix of the port rows and applies a random overall scale;
    the result is nonsingular by construction.
    """
    p, ns = phi_p.shape
    scale = np.abs(phi_p).max()
    if policy == "identity-pad":
        _, _, piv = la.qr(phi_p, pivoting=True, mode="economic")
        phi_i = np.zeros((ns - p, ns))
        phi_i[np.arange(ns - p), piv[p:]] = scale
        return phi_i
    rng = np.random.default_rng(seed)
    k = ns - p
    null = la.null_space(phi_p)
    if null.shape[1] != k:
        raise SingularModeShapeError("port mode shapes are rank deficient")
    rot, _ = np.linalg.qr(rng.standard_normal((k, k)))
    row_norms = np.linalg.norm(phi_p, axis=1)
    mix = rng.standard_normal((k, p)) @ (phi_p / row_norms[:, None])
    rows = rot @ null.T + 0.5 * mix
    return rows * row_norms.mean() * np.exp(rng.uniform(-1.0, 1.0))


def _spectral_matrices(phi_full, omega_sq, two_zeta_omega):
    inv = np.linalg.inv(phi_full)
    c = _symmetrize(inv.T @ inv)
    g = _symmetrize(inv.T @ (two_zeta_omega[:, None] * inv))
    b = _symmetrize(inv.T @ (omega_sq[:, None] * inv))
    return c, g, b


def synthesize(model, mech, cfg):
    """
    Synthesize the overall network damping ``cfg.targeted_modes``.

    Parameters
    ----------
    model : PiezoStructureModel
    mech : ModalBasis
        Mass-normalized short-circuit basis of ``model``.
    cfg : SynthesisConfig

    Returns
    -------
    Synthesis

    Raises
    ------
    UncontrollableModeError
        A target is rigid or not coupled to any transducer.
    SingularModeShapeError
        The identity-padded mode-shape matrix is numerically singular; retry
        with ``internal_shape_policy="random-orthogonal"``.
    """
    if mech.normalization != "mass":
        raise ModelError("mechanical basis must be mass-normalized")
    targets = list(cfg.targeted_modes)
    singles = np.column_stack(
        [optimal_shape_single(model, mech, r)[0] for r in targets]
    )
    shapes = scale_shapes(singles, cfg, model.capacitance_piezo)
    phi_p = shapes.capacitance_normalized
    w_sc = mech.omega[targets]
    gamma = np.einsum("ik,ik->k", model.coupling.T @ mech.shapes[:, targets], phi_p)
    eemcf = np.abs(gamma) / w_sc
    if np.any(eemcf >= np.sqrt(2.0)):
        raise SynthesisError("modal EEMCF too large for the tuning rules (>= sqrt(2))")
    tuning = modal_tuning(eemcf, w_sc)
    two_zo = 2.0 * tuning.zeta_e * np.sqrt(tuning.omega_e_sq)

    p, ns = phi_p.shape
    complement = beta = None
    if p == ns:
        phi_full = phi_p
        c, g, b = _spectral_matrices(phi_full, tuning.omega_e_sq, two_zo)
        phi_e = phi_p
    elif p < ns:
        phi_i = _internal_shapes(phi_p, cfg.internal_shape_policy, cfg.seed)
        phi_full = np.vstack([phi_p, phi_i])
        c, g, b = _spectral_matrices(phi_full, tuning.omega_e_sq, two_zo)
        phi_e = phi_full
    else:
        phi_e = phi_p
        cp = model.capacitance_piezo
        if cfg.complement_policy == "kernel":
            v = la.null_space(phi_p.T)
            beta = float(la.eigvalsh(v.T @ cp @ v)[-1])
            gram_inv = np.linalg.inv(phi_p.T @ phi_p)
            left = phi_p @ gram_inv
            c = _symmetrize(left @ left.T + beta * v @ v.T)
            g = _symmetrize(left @ (two_zo[:, None] * left.T))
            b = _symmetrize(left @ (tuning.omega_e_sq[:, None] * left.T))
            phi_full = np.hstack([phi_p, v / np.sqrt(beta)])
            complement = v
        else:
            cp_sqrt = sym_power(cp, 0.5)
            phibar = cp_sqrt @ phi_p
            vbar = la.null_space(phibar.T)
            phi_full = np.hstack([phi_p, np.linalg.solve(cp_sqrt, vbar)])
            zeros = np.zeros(p - ns)
            c, g, b = _spectral_matrices(
                phi_full,
                np.concatenate([tuning.omega_e_sq, zeros]),
                np.concatenate([two_zo, zeros]),
            )
            complement = vbar
            if np.allclose(cp, cp[0, 0] * np.eye(p), rtol=0, atol=1e-14 * abs(cp[0, 0])):
                beta = float(cp[0, 0])
    cond = float(np.linalg.cond(phi_full))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularModeShapeError(
            f"electrical mode-shape matrix is singular (condition number {cond:.3e}); "
            "retry with internal_shape_policy='random-orthogonal'"
        )
    ne = c.shape[0]
    net = ElectricalNetwork(c, g, b, port_localization(p, ne - p), name="modal-synthesis")
    modes = ModalBasis(phi_e, tuning.omega_e_sq, "capacitance", tuning.zeta_e)
    return Synthesis(net, shapes, tuning, modes, eemcf, cond, complement, beta)


@dataclass(frozen=True)
class PassivityReport:
    """
    Smallest eigenvalues of the network matrices and the passivity verdict.

    Each check passes when ``lambda_min >= -TOL_PSD * ||.||_2``; the
    interconnecting capacitance is judged relative to ``||C||_2``.
    """

    min_eig_c: float
    min_eig_g: float
    min_eig_b: float
    min_eig_ce: float
    norm_c: float
    norm_g: float
    norm_b: float
    necessary_min_eig: Optional[float] = None
    necessary_norm: Optional[float] = None
    tol: float = TOL_PSD

    def _ok(self, lam, nrm):
        return lam >= -self.tol * nrm

    @property
    def checks(self):
        out = {
            "C": self._ok(self.min_eig_c, self.norm_c),
            "G": self._ok(self.min_eig_g, self.norm_g),
            "B": self._ok(self.min_eig_b, self.norm_b),
            "C_e": self._ok(self.min_eig_ce, self.norm_c),
        }
        if self.necessary_min_eig is not None:
            out["necessary"] = self._ok(self.necessary_min_eig, self.necessary_norm)
        return out

    @property
    def passive(self):
        return all(self.checks.values())

    def to_text(self):
        checks = self.checks
        rows = [
            ("C", self.min_eig_c, self.norm_c),
            ("G", self.min_eig_g, self.norm_g),
            ("B", self.min_eig_b, self.norm_b),
            ("C_e", self.min_eig_ce, self.norm_c),
        ]
        if self.necessary_min_eig is not None:
            rows.append(("necessary", self.necessary_min_eig, self.necessary_norm))
        lines = [f"tolerance={self.tol!r}"]
        for key, lam, nrm in rows:
            verdict = "pass" if checks[key] else "fail"
            lines.append(f"min_eig_{key}={lam!r} norm={nrm!r} {verdict}")
        lines.append(f"verdict={'pass' if self.passive else 'fail'}")
        return "\n".join(lines) + "\n"


def check_passivity(net, cap_piezo, modes=None, tol=TOL_PSD):
    """
    Report on the passivity of ``net`` once the transducers are removed.

    ``C``, ``G``, ``B`` and the interconnecting capacitance
    ``C - E_p Cp E_p^T`` must all be positive semidefinite. When the
    electrical ``modes`` are given, the necessary condition
    ``Cp^-1 - E_p^T Phi_e Phi_e^T E_p >= 0`` is evaluated as well.
    """
    cp = np.atleast_2d(np.asarray(cap_piezo, dtype=float))
    ce = net.interconnecting_capacitance(cp)
    nec = nec_norm = None
    if modes is not None:
        phi_p = net.localization.T @ modes.shapes
        cp_inv = np.linalg.inv(cp)
        nec_mat = _symmetrize(cp_inv - phi_p @ phi_p.T)
        nec = min_eig(nec_mat)
        nec_norm = norm2(cp_inv)
    return PassivityReport(
        min_eig_c=min_eig(net.capacitance),
        min_eig_g=min_eig(net.conductance),
        min_eig_b=min_eig(net.reluctance),
        min_eig_ce=min_eig(_symmetrize(ce)),
        norm_c=norm2(net.capacitance),
        norm_g=norm2(net.conductance),
        norm_b=norm2(net.reluctance),
        necessary_min_eig=nec,
        necessary_norm=nec_norm,
        tol=tol,
    )


def determinant_identity(capacitance, cap_piezo, localization):
    """
    Both sides of ``det(C - E Cp E^T) = det(Cp^-1 - E^T C^-1 E) det(C) det(Cp)``.

    Returns the two sides as ``(sign, log|det|)`` pairs, so that large or
    tiny determinants stay representable.
    """
    c = np.asarray(capacitance, dtype=float)
    cp = np.atleast_2d(np.asarray(cap_piezo, dtype=float))
    e = np.asarray(localization, dtype=float)
    lhs = np.linalg.slogdet(c - e @ cp @ e.T)
    s1, l1 = np.linalg.slogdet(np.linalg.inv(cp) - e.T @ np.linalg.solve(c, e))
    s2, l2 = np.linalg.slogdet(c)
    s3, l3 = np.linalg.slogdet(cp)
    return (float(lhs[0]), float(lhs[1])), (float(s1 * s2 * s3), float(l1 + l2 + l3))
