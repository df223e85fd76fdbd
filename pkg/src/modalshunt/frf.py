"""
Frequency response of a piezoelectric structure shunted by a network.

With ``s = j w`` the coupled equations read

    H(s) x + s Gamma E_p^T psi = f,      Y(s) psi - E_p Gamma^T x = 0,

with ``H = M s^2 + K_sc`` (plus modal damping) and ``Y = s C + G + B / s``.
The flux linkages are eliminated, leaving
``(H + s Gamma Z_p(s) Gamma^T) x = f`` where ``Z_p = E_p^T Y^-1 E_p`` is
the port impedance-like block of the network.
"""

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .model import FrfResult, ModelError, NumericalError, PiezoStructureModel, ElectricalNetwork
from .modal import solve_modes
from .synthesis import yamada_sdof

# grid points closer than this (relative) to an undamped pole are moved
POLE_CLEARANCE = 1e-6
_CHUNK = 256


@dataclass(frozen=True)
class SweepConfig:
    """
    Frequency sweep and excitation/observation settings.

    ``mech_damping`` is a modal damping ratio applied to every mechanical
    mode. ``quantity`` selects displacement- or velocity-per-force.
    Negative dof indices count from the end, as in numpy.
    """

    f_min: float
    f_max: float
    n_points: int = 2000
    spacing: str = "log"
    mech_damping: float = 0.0
    input_dof: int = 0
    output_dof: int = 0
    quantity: str = "velocity"
    name: str = "sweep"

    def __post_init__(self):
        if self.n_points < 2:
            raise ModelError("n_points must be >= 2")
        if self.spacing not in ("linear", "log"):
            raise ModelError("spacing must be 'linear' or 'log'")
        if not 0 < self.f_min < self.f_max:
            raise ModelError("need 0 < f_min < f_max (zero frequency is excluded)")
        if self.mech_damping < 0:
            raise ModelError("mech_damping must be nonnegative")
        if self.quantity not in ("displacement", "velocity"):
            raise ModelError("quantity must be 'displacement' or 'velocity'")


def frequency_grid(sweep, resonances_hz=(), avoid_hz=(), extra_points=200, window=0.05):
    """
    Sweep grid densified around resonances and kept clear of undamped poles.

    ``extra_points`` log-spaced points are inserted within ``+/- window``
    (relative) of each frequency in ``resonances_hz``; any point within
    ``POLE_CLEARANCE`` of a frequency in ``avoid_hz`` is pushed out to that
    clearance.
    """
    if sweep.spacing == "log":
        grid = np.geomspace(sweep.f_min, sweep.f_max, sweep.n_points)
    else:
        grid = np.linspace(sweep.f_min, sweep.f_max, sweep.n_points)
    parts = [grid]
    for fr in resonances_hz:
        lo = max(fr * (1 - window), sweep.f_min)
        hi = min(fr * (1 + window), sweep.f_max)
        if lo < hi:
            parts.append(np.geomspace(lo, hi, extra_points))
    grid = np.unique(np.concatenate(parts))
    for fa in np.asarray(avoid_hz, dtype=float):
        if not fa > 0:
            continue
        close = np.abs(grid - fa) < POLE_CLEARANCE * fa
        grid[close] = np.where(
            grid[close] < fa, fa * (1 - 2 * POLE_CLEARANCE), fa * (1 + 2 * POLE_CLEARANCE)
        )
    grid = np.unique(grid)
    return grid[(grid >= sweep.f_min) & (grid <= sweep.f_max)]


def _port_block(net, s):
    """``Z_p(s) = E_p^T Y(s)^-1 E_p`` for a batch of ``s``; inf on singular points."""
    y = (s[:, None, None] * net.capacitance + net.conductance
         + net.reluctance / s[:, None, None])
    e = np.broadcast_to(net.localization, (s.size,) + net.localization.shape)
    ports = net.port_indices
    try:
        x = np.linalg.solve(y, e)
        return x[:, ports, :]
    except np.linalg.LinAlgError:
        out = np.full((s.size, net.n_ports, net.n_ports), np.nan, dtype=complex)
        for i in range(s.size):
            try:
                out[i] = np.linalg.solve(y[i], net.localization)[ports, :]
            except np.linalg.LinAlgError:
                pass
        return out


def _modal_response(model, net, mech, zeta, w, i_in, i_out):
    phi = mech.shapes
    wm = mech.omega
    s = 1j * w
    d = wm[None, :] ** 2 - w[:, None] ** 2 + 2j * zeta * wm[None, :] * w[:, None]
    b = phi[i_in, :]
    c_out = phi[i_out, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = b / d
        if net is None:
            return u @ c_out
        a = phi.T @ model.coupling
        zp = _port_block(net, s)
        wmat = s[:, None, None] * zp
        inv_d = 1.0 / d
        atda = np.einsum("np,fn,nq->fpq", a, inv_d, a)
        atu = u @ a
        p = a.shape[1]
        lhs = np.eye(p) + wmat @ atda
        rhs = np.einsum("fpq,fq->fp", wmat, atu)
        z = np.full(rhs.shape, np.nan, dtype=complex)
        ok = np.all(np.isfinite(lhs), axis=(1, 2)) & np.all(np.isfinite(rhs), axis=1)
        for i in np.flatnonzero(ok):
            try:
                z[i] = np.linalg.solve(lhs[i], rhs[i])
            except np.linalg.LinAlgError:
                pass
        q = u - (z @ a.T) * inv_d
        return q @ c_out


def _direct_response(model, net, mech, zeta, w, i_in, i_out):
    m, k = model.mass, model.stiffness_sc
    mphi = m @ mech.shapes
    damp = (mphi * (2 * zeta * mech.omega)) @ mphi.T
    gam = model.coupling
    f = np.zeros(model.n_dof)
    f[i_in] = 1.0
    out = np.full(w.shape, np.nan, dtype=complex)
    for i, wi in enumerate(w):
        s = 1j * wi
        h = k - wi * wi * m + s * damp
        if net is not None:
            zp = _port_block(net, np.array([s]))[0]
            h = h + s * gam @ zp @ gam.T
        if not np.all(np.isfinite(h)):
            continue
        try:
            out[i] = la.solve(h, f)[i_out]
        except (la.LinAlgError, ValueError):
            pass
    return out


def coupled_frf(model, net, sweep, freq_hz=None, mech=None, method="modal"):
    """
    FRF from ``sweep.input_dof`` to ``sweep.output_dof``.

    Parameters
    ----------
    model : PiezoStructureModel
    net : ElectricalNetwork or None
        ``None`` gives the short-circuit response (``psi = 0``).
    sweep : SweepConfig
    freq_hz : 1d array_like, optional
        Grid to use instead of :func:`frequency_grid` (which clears the
        short-circuit poles).
    mech : ModalBasis, optional
        Short-circuit basis; computed when omitted.
    method : {"modal", "direct"}
        ``"modal"`` eliminates the network in the full (untruncated) modal
        basis with a port-sized correction; ``"direct"`` forms and solves
        the physical N x N Schur complement at every point.

    Returns
    -------
    FrfResult
        Points where a solve was singular are dropped and listed in
        ``metadata["skipped_hz"]``.
    """
    if net is not None and net.n_ports != model.n_transducers:
        raise ModelError(
            f"network has {net.n_ports} ports, model has {model.n_transducers} transducers"
        )
    if mech is None:
        mech = solve_modes(model.stiffness_sc, model.mass)
    if freq_hz is None:
        freq_hz = frequency_grid(sweep, avoid_hz=mech.freq_hz[~mech.rigid])
    freq_hz = np.asarray(freq_hz, dtype=float)
    n = model.n_dof
    i_in = range(n)[sweep.input_dof]
    i_out = range(n)[sweep.output_dof]
    w = 2 * np.pi * freq_hz
    solver = {"modal": _modal_response, "direct": _direct_response}[method]
    h = np.concatenate([
        solver(model, net, mech, sweep.mech_damping, w[j:j + _CHUNK], i_in, i_out)
        for j in range(0, w.size, _CHUNK)
    ]) if w.size else np.zeros(0, dtype=complex)
    if sweep.quantity == "velocity":
        h = h * (1j * w)
    good = np.isfinite(h)
    if not np.any(good):
        raise NumericalError("coupled system is singular at every grid point")
    meta = {
        "model": model.name,
        "network": "short-circuit" if net is None else net.name,
        "input_dof": i_in,
        "output_dof": i_out,
        "quantity": sweep.quantity,
        "mech_damping": sweep.mech_damping,
        "sweep": sweep.name,
    }
    if not np.all(good):
        meta["skipped_hz"] = freq_hz[~good].tolist()
    return FrfResult(freq_hz[good], h[good], meta)


def sdof_model(kc, omega_sc, cp):
    """Unit-mass oscillator with one transducer of EEMCF ``kc``."""
    k_sc = omega_sc**2
    gamma = kc * np.sqrt(cp * k_sc)
    return PiezoStructureModel([[1.0]], [[k_sc]], [[gamma]], [[cp]], name=f"sdof-kc{kc:g}")


def sdof_shunt(kc, omega_sc, cp):
    """Parallel RL shunt tuned with Yamada's rules (``C`` is the transducer alone)."""
    b, g = yamada_sdof(kc * kc, omega_sc, cp)
    return ElectricalNetwork([[cp]], [[g]], [[b]], [[1.0]], name=f"parallel-RL-kc{kc:g}")


def sdof_sweep(omega_sc, n_points=2001):
    """Linear sweep over ``[0.5, 1.5] w_sc`` used by the SDOF shunt study."""
    f = omega_sc / (2 * np.pi)
    return SweepConfig(0.5 * f, 1.5 * f, n_points, "linear", name="sdof")


def sdof_demo(kc, omega_sc, cp, sweep=None, freq_hz=None):
    """
    FRF of a unit-mass oscillator with a Yamada-tuned parallel RL shunt.

    The default grid is :func:`sdof_sweep` densified around ``w_sc`` and
    kept clear of the short-circuit pole.
    """
    if not 0 < kc < 1:
        raise ModelError("kc must lie in (0, 1)")
    sweep = sdof_sweep(omega_sc) if sweep is None else sweep
    if freq_hz is None:
        f = omega_sc / (2 * np.pi)
        freq_hz = frequency_grid(sweep, (f,), (f,))
    model = sdof_model(kc, omega_sc, cp)
    return coupled_frf(model, sdof_shunt(kc, omega_sc, cp), sweep, freq_hz=freq_hz)


def band_mask(freq_hz, band):
    lo, hi = band
    mask = (freq_hz >= lo) & (freq_hz <= hi)
    if not np.any(mask):
        raise ModelError(f"band [{lo}, {hi}] Hz contains no grid points")
    return mask


def band_peak(frf, band):
    """Largest ``|H|`` over ``band`` (the per-band H-infinity level)."""
    return float(frf.magnitude[band_mask(frf.freq_hz, band)].max())


def band_local_maxima(frf, band):
    """Frequencies and magnitudes of the interior local maxima of ``|H|`` in ``band``."""
    mask = band_mask(frf.freq_hz, band)
    f = frf.freq_hz[mask]
    a = frf.magnitude[mask]
    idx = np.flatnonzero((a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:])) + 1
    return f[idx], a[idx]


def attenuation(baseline, damped, bands):
    """
    Per-band attenuation in dB: ``20 log10(max|baseline| / max|damped|)``.
    """
    if baseline.freq_hz.shape != damped.freq_hz.shape or not np.array_equal(
        baseline.freq_hz, damped.freq_hz
    ):
        raise ModelError("baseline and damped FRFs must share the same grid")
    return [
        20.0 * np.log10(band_peak(baseline, band) / band_peak(damped, band))
        for band in bands
    ]


def write_frf_csv(frf, path):
    """CSV with a ``# key=value`` metadata block, then ``freq_hz,re,im,abs`` rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key in sorted(frf.metadata):
            fh.write(f"# {key}={frf.metadata[key]}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["freq_hz", "re", "im", "abs"])
        for f, h in zip(frf.freq_hz, frf.response):
            writer.writerow([repr(float(f)), repr(float(h.real)),
                             repr(float(h.imag)), repr(float(abs(h)))])


def read_frf_csv(path):
    meta = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            else:
                rows.append(line)
    reader = csv.DictReader(rows)
    data = [(float(r["freq_hz"]), complex(float(r["re"]), float(r["im"]))) for r in reader]
    f = np.array([d[0] for d in data])
    h = np.array([d[1] for d in data], dtype=complex)
    return FrfResult(f, h, meta)
