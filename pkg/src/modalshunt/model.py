"""
Shared domain types for piezoelectric structures and electrical networks.

All containers copy their inputs and freeze the underlying arrays, so a
constructed object can be shared freely.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as la

# relative to the matrix 2-norm
TOL_PSD = 1e-10
TOL_ORTH = 1e-8
TOL_RIGID = 1e-13
TOL_SYM = 1e-10


class ModelError(ValueError):
    """Raised when matrices violate a dimensional or definiteness contract."""


class SynthesisError(RuntimeError):
    """Raised when a network cannot be synthesized for the requested targets."""


class UncontrollableModeError(SynthesisError):
    """A targeted mode is rigid or has no coupling with the transducers."""


class SingularModeShapeError(SynthesisError):
    """The completed electrical mode-shape matrix is numerically singular."""


class NumericalError(RuntimeError):
    """A linear solve failed (singular system at a frequency point)."""


def _frozen(a, name, ndim=2):
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim == 1 and ndim == 2:
        arr = arr.reshape(-1, 1)
    if arr.ndim != ndim:
        raise ModelError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ModelError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _check_square(a, name, n=None):
    if a.shape[0] != a.shape[1]:
        raise ModelError(f"{name} must be square, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ModelError(f"{name} must be {n}x{n}, got shape {a.shape}")


def _check_symmetric(a, name):
    scale = np.abs(a).max(initial=0.0)
    if np.abs(a - a.T).max(initial=0.0) > TOL_SYM * max(scale, np.finfo(float).tiny):
        raise ModelError(f"{name} is not symmetric")


def _check_pd(a, name):
    try:
        la.cholesky(a, lower=True)
    except la.LinAlgError:
        raise ModelError(f"{name} is not positive definite") from None


def min_eig(a):
    """Smallest eigenvalue of a symmetric matrix (0 for an empty matrix)."""
    if a.size == 0:
        return 0.0
    return float(la.eigvalsh(a)[0])


def norm2(a):
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def is_psd(a, tol=TOL_PSD):
    return min_eig(a) >= -tol * norm2(a)


@dataclass(frozen=True)
class PiezoStructureModel:
    """
    Structure with `n_dof` mechanical dofs and `n_transducers` piezoelectric
    transducers.

    Parameters
    ----------
    mass : (N, N) array_like
        Symmetric positive-definite mass matrix.
    stiffness_sc : (N, N) array_like
        Symmetric positive-semidefinite stiffness with short-circuited
        transducers.
    coupling : (N, P) array_like
        Piezoelectric coupling matrix (charge per generalized displacement).
    capacitance_piezo : (P, P) array_like
        Blocked (constant strain) capacitance of the transducers.
    name : str
        Free-form identifier carried into FRF metadata.
    """

    mass: np.ndarray
    stiffness_sc: np.ndarray
    coupling: np.ndarray
    capacitance_piezo: np.ndarray
    name: str = "model"

    def __post_init__(self):
        m = _frozen(self.mass, "mass")
        k = _frozen(self.stiffness_sc, "stiffness_sc")
        g = _frozen(self.coupling, "coupling")
        cp = _frozen(np.atleast_2d(self.capacitance_piezo), "capacitance_piezo")
        _check_square(m, "mass")
        n = m.shape[0]
        if n < 1:
            raise ModelError("model needs at least one mechanical dof")
        _check_square(k, "stiffness_sc", n)
        if g.shape[0] != n:
            raise ModelError(
                f"coupling has {g.shape[0]} rows but the model has {n} dofs"
            )
        p = g.shape[1]
        if p < 1:
            raise ModelError("model needs at least one transducer")
        _check_square(cp, "capacitance_piezo", p)
        for a, nm in ((m, "mass"), (k, "stiffness_sc"), (cp, "capacitance_piezo")):
            _check_symmetric(a, nm)
        _check_pd(m, "mass")
        _check_pd(cp, "capacitance_piezo")
        if not is_psd(k):
            raise ModelError("stiffness_sc is not positive semidefinite")
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "stiffness_sc", k)
        object.__setattr__(self, "coupling", g)
        object.__setattr__(self, "capacitance_piezo", cp)

    @property
    def n_dof(self):
        return self.mass.shape[0]

    @property
    def n_transducers(self):
        return self.coupling.shape[1]

    def stiffness_oc(self):
        """Stiffness with all transducers open-circuited (charge-free)."""
        g = self.coupling
        return self.stiffness_sc + g @ np.linalg.solve(self.capacitance_piezo, g.T)


def port_localization(n_ports, n_internal=0):
    """Localization matrix with the ports first, i.e. ``E_p^T = [I 0]``."""
    e = np.zeros((n_ports + n_internal, n_ports))
    e[:n_ports, :n_ports] = np.eye(n_ports)
    return e


@dataclass(frozen=True)
class ElectricalNetwork:
    """
    Overall electrical network (transducer capacitance included).

    ``capacitance``, ``conductance`` and ``reluctance`` are the Ne x Ne
    matrices of ``Y(s) = s C + G + B / s``; ``localization`` (Ne x P)
    selects the dofs wired to the transducers.

    Definiteness is *not* enforced here so that non-passive networks can
    still be loaded and reported on by :func:`modalshunt.synthesis.check_passivity`.
    """

    capacitance: np.ndarray
    conductance: np.ndarray
    reluctance: np.ndarray
    localization: np.ndarray
    name: str = "network"

    def __post_init__(self):
        c = _frozen(self.capacitance, "capacitance")
        g = _frozen(self.conductance, "conductance")
        b = _frozen(self.reluctance, "reluctance")
        e = _frozen(self.localization, "localization")
        _check_square(c, "capacitance")
        ne = c.shape[0]
        _check_square(g, "conductance", ne)
        _check_square(b, "reluctance", ne)
        for a, nm in ((c, "capacitance"), (g, "conductance"), (b, "reluctance")):
            _check_symmetric(a, nm)
        if e.shape[0] != ne or e.shape[1] < 1 or e.shape[1] > ne:
            raise ModelError(f"localization must be {ne} x P with 1 <= P <= {ne}")
        if not np.all((e == 0.0) | (e == 1.0)) or not np.all(e.sum(axis=0) == 1.0):
            raise ModelError("localization columns must be canonical unit vectors")
        if not np.array_equal(e.T @ e, np.eye(e.shape[1])):
            raise ModelError("localization columns must be distinct")
        object.__setattr__(self, "capacitance", c)
        object.__setattr__(self, "conductance", g)
        object.__setattr__(self, "reluctance", b)
        object.__setattr__(self, "localization", e)

    @property
    def n_total(self):
        return self.capacitance.shape[0]

    @property
    def n_ports(self):
        return self.localization.shape[1]

    @property
    def n_internal(self):
        return self.n_total - self.n_ports

    @property
    def port_indices(self):
        return np.argmax(self.localization, axis=0)

    def interconnecting_capacitance(self, capacitance_piezo):
        """``C - E_p C_p E_p^T``: what remains once the transducers are removed."""
        cp = np.atleast_2d(capacitance_piezo)
        if cp.shape != (self.n_ports, self.n_ports):
            raise ModelError(
                f"capacitance_piezo must be {self.n_ports}x{self.n_ports}"
            )
        e = self.localization
        return self.capacitance - e @ cp @ e.T

    def admittance(self, s):
        """Nodal admittance ``Y(s)``; ``s`` must be nonzero."""
        return s * self.capacitance + self.conductance + self.reluctance / s


@dataclass(frozen=True)
class ModalBasis:
    """
    Mode shapes (columns) with squared natural frequencies.

    ``normalization`` is ``"mass"`` for mechanical bases and
    ``"capacitance"`` for electrical ones.
    """

    shapes: np.ndarray
    omega_sq: np.ndarray
    normalization: str = "mass"
    damping_ratios: Optional[np.ndarray] = None

    def __post_init__(self):
        phi = _frozen(self.shapes, "shapes")
        w2 = _frozen(self.omega_sq, "omega_sq", ndim=1)
        if self.normalization not in ("mass", "capacitance"):
            raise ModelError(f"unknown normalization {self.normalization!r}")
        if phi.shape[1] != w2.shape[0]:
            raise ModelError("one squared frequency is needed per mode shape")
        if np.any(w2 < 0.0):
            raise ModelError("omega_sq must be nonnegative")
        object.__setattr__(self, "shapes", phi)
        object.__setattr__(self, "omega_sq", w2)
        if self.damping_ratios is not None:
            z = _frozen(self.damping_ratios, "damping_ratios", ndim=1)
            if z.shape != w2.shape or np.any(z < 0.0):
                raise ModelError("damping_ratios must be nonnegative, one per mode")
            object.__setattr__(self, "damping_ratios", z)

    @property
    def n_modes(self):
        return self.omega_sq.shape[0]

    @property
    def omega(self):
        return np.sqrt(self.omega_sq)

    @property
    def freq_hz(self):
        return self.omega / (2 * np.pi)

    @property
    def rigid(self):
        """Boolean mask of zero-frequency (rigid-body) modes."""
        top = self.omega_sq.max(initial=0.0)
        return self.omega_sq <= TOL_RIGID * top

    @property
    def flexible_indices(self):
        return np.flatnonzero(~self.rigid)


_POLICIES = ("identity-pad", "random-orthogonal")
_COMPLETIONS = ("whitened", "kernel")


@dataclass(frozen=True)
class SynthesisConfig:
    """
    Design choices for :func:`modalshunt.synthesis.synthesize`.

    Parameters
    ----------
    targeted_modes : sequence of int
        Strictly increasing mechanical mode indices (0-based). Electrical
        mode ``k`` is paired with ``targeted_modes[k]``.
    relative_scaling : sequence of float, optional
        Positive relative scaling factors, one per target (default ones).
    internal_shape_policy : {"identity-pad", "random-orthogonal"}
        How internal-dof mode shapes are completed when there are fewer
        ports than targets.
    alpha_fraction : float
        Fraction ``f`` in (0, 1] of the passivity bound on the global
        scaling; 1 puts the network exactly on the bound.
    complement_policy : {"whitened", "kernel"}
        Completion of the non-targeted electrical modes when there are more
        ports than targets. ``"kernel"`` is the orthogonal-kernel
        construction with ``D_V = beta I``; ``"whitened"`` applies the same
        construction in capacitance-whitened port coordinates, which
        coincides with ``"kernel"`` for identical transducers and stays
        passive otherwise.
    seed : int, optional
        Seed for the random-orthogonal completion.
    """

    targeted_modes: Sequence[int]
    relative_scaling: Optional[Sequence[float]] = None
    internal_shape_policy: str = "identity-pad"
    alpha_fraction: float = 1.0
    complement_policy: str = "whitened"
    seed: Optional[int] = None

    def __post_init__(self):
        t = tuple(int(i) for i in self.targeted_modes)
        if len(t) < 1:
            raise ModelError("at least one targeted mode is required")
        if any(b <= a for a, b in zip(t, t[1:])) or t[0] < 0:
            raise ModelError("targeted_modes must be nonnegative and strictly increasing")
        d = (1.0,) * len(t) if self.relative_scaling is None else tuple(
            float(x) for x in self.relative_scaling
        )
        if len(d) != len(t):
            raise ModelError("one relative scaling factor is needed per target")
        if not all(np.isfinite(x) and x > 0 for x in d):
            raise ModelError("relative scaling factors must be positive")
        if self.internal_shape_policy not in _POLICIES:
            raise ModelError(f"internal_shape_policy must be one of {_POLICIES}")
        if self.complement_policy not in _COMPLETIONS:
            raise ModelError(f"complement_policy must be one of {_COMPLETIONS}")
        if not 0.0 < self.alpha_fraction <= 1.0:
            raise ModelError("alpha_fraction must lie in (0, 1]")
        object.__setattr__(self, "targeted_modes", t)
        object.__setattr__(self, "relative_scaling", d)

    @property
    def n_targets(self):
        return len(self.targeted_modes)


@dataclass(frozen=True)
class FrfResult:
    """Complex frequency response sampled on ``freq_hz``."""

    freq_hz: np.ndarray
    response: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.array(self.freq_hz, dtype=float, copy=True)
        h = np.array(self.response, dtype=complex, copy=True)
        if f.ndim != 1 or h.shape != f.shape:
            raise ModelError("response must have one value per frequency")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise ModelError("freq_hz must be strictly increasing")
        f.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "freq_hz", f)
        object.__setattr__(self, "response", h)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def magnitude(self):
        return np.abs(self.response)
