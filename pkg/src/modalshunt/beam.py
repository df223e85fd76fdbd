"""
Free-free piezoelectric beam and its analog electrical network.

The beam is a chain of identical cells, each covered by a pair of thin
piezoelectric patches, discretized with Hermite-cubic Euler-Bernoulli
elements (deflection and rotation per node).
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import ElectricalNetwork, ModelError, PiezoStructureModel

# Blocked capacitance of one patch; a cell carries a pair wired in parallel.
PATCH_CAPACITANCE = 21.96e-9


@dataclass(frozen=True)
class BeamConfig:
    """
    Geometry, material and transducer data of the cell-periodic beam.

    The defaults describe a steel beam whose first flexible frequency
    (about 53 Hz) sits on the first resonance of the analog cell network
    built from :class:`AnalogCellConfig` defaults, with a patch coupling
    giving a first-mode EEMCF of about 0.1 when every patch pair is
    open-circuited.

    ``grouping`` partitions the cell indices (0-based) into groups wired in
    parallel; ``None`` keeps one port per cell.
    """

    n_cells: int = 20
    elements_per_cell: int = 10
    length: float = 1.0
    width: float = 0.02
    thickness: float = 0.0099587
    density: float = 7800.0
    youngs_modulus: float = 210e9
    patch_capacitance: float = 2 * PATCH_CAPACITANCE
    patch_coupling: float = 1.7448e-3
    patch_stiffness_add: float = 0.0
    grouping: Optional[Sequence[Sequence[int]]] = None

    def __post_init__(self):
        if self.n_cells < 1 or self.elements_per_cell < 1:
            raise ModelError("n_cells and elements_per_cell must be >= 1")
        for name in ("length", "width", "thickness", "density", "youngs_modulus",
                     "patch_capacitance", "patch_coupling"):
            if not getattr(self, name) > 0:
                raise ModelError(f"{name} must be positive")
        if self.patch_stiffness_add < 0:
            raise ModelError("patch_stiffness_add must be nonnegative")
        if self.grouping is not None:
            groups = tuple(tuple(int(c) for c in g) for g in self.grouping)
            flat = sorted(c for g in groups for c in g)
            if any(len(g) == 0 for g in groups) or flat != list(range(self.n_cells)):
                raise ModelError("grouping must partition the cell indices 0..n_cells-1")
            object.__setattr__(self, "grouping", groups)

    @property
    def n_elements(self):
        return self.n_cells * self.elements_per_cell

    @property
    def n_dof(self):
        return 2 * (self.n_elements + 1)

    @property
    def bending_stiffness(self):
        return self.youngs_modulus * self.width * self.thickness**3 / 12.0

    @property
    def mass_per_length(self):
        return self.density * self.width * self.thickness


def contiguous_groups(n_cells, n_groups):
    """Split ``range(n_cells)`` into ``n_groups`` runs of adjacent cells."""
    if not 1 <= n_groups <= n_cells:
        raise ModelError("need 1 <= n_groups <= n_cells")
    return tuple(tuple(int(c) for c in chunk)
                 for chunk in np.array_split(np.arange(n_cells), n_groups))


def hermite_beam_element(ei, rho_a, le):
    """Stiffness and consistent mass of a 2-node Euler-Bernoulli element."""
    l2 = le * le
    k = ei / le**3 * np.array([
        [12.0, 6 * le, -12.0, 6 * le],
        [6 * le, 4 * l2, -6 * le, 2 * l2],
        [-12.0, -6 * le, 12.0, -6 * le],
        [6 * le, 2 * l2, -6 * le, 4 * l2],
    ])
    m = rho_a * le / 420.0 * np.array([
        [156.0, 22 * le, 54.0, -13 * le],
        [22 * le, 4 * l2, 13 * le, -3 * l2],
        [54.0, 13 * le, 156.0, -22 * le],
        [-13 * le, -3 * l2, -22 * le, 4 * l2],
    ])
    return k, m


def cell_coupling(cfg):
    """
    Coupling matrix with one column per cell (no grouping).

    A thin symmetric patch pair produces a charge proportional to the
    relative rotation of the cell ends, so column ``j`` holds
    ``-patch_coupling`` on the rotation dof at the left end of cell ``j``
    and ``+patch_coupling`` at its right end.
    """
    gam = np.zeros((cfg.n_dof, cfg.n_cells))
    for j in range(cfg.n_cells):
        left = j * cfg.elements_per_cell
        right = left + cfg.elements_per_cell
        gam[2 * left + 1, j] -= cfg.patch_coupling
        gam[2 * right + 1, j] += cfg.patch_coupling
    return gam


def group_matrix(cfg):
    """Cell-to-port incidence (n_cells x P) of the parallel connection."""
    groups = cfg.grouping or tuple((j,) for j in range(cfg.n_cells))
    t = np.zeros((cfg.n_cells, len(groups)))
    for p, g in enumerate(groups):
        t[list(g), p] = 1.0
    return t


def build_beam(cfg=None):
    """
    Assemble the free-free beam of ``cfg`` into a :class:`PiezoStructureModel`.

    Grouped cells are wired in parallel: their coupling columns and
    capacitances add up.
    """
    cfg = BeamConfig() if cfg is None else cfg
    ne = cfg.n_elements
    le = cfg.length / ne
    k = np.zeros((cfg.n_dof, cfg.n_dof))
    m = np.zeros_like(k)
    rho_a = cfg.mass_per_length
    for e in range(ne):
        ei = cfg.bending_stiffness + cfg.patch_stiffness_add
        ke, me = hermite_beam_element(ei, rho_a, le)
        dofs = slice(2 * e, 2 * e + 4)
        k[dofs, dofs] += ke
        m[dofs, dofs] += me
    t = group_matrix(cfg)
    gam = cell_coupling(cfg) @ t
    cp = np.diag(cfg.patch_capacitance * t.sum(axis=0))
    name = f"beam{cfg.n_cells}x{cfg.elements_per_cell}-P{t.shape[1]}"
    return PiezoStructureModel(m, k, gam, cp, name=name)


@dataclass(frozen=True)
class AnalogCellConfig:
    """Analog electrical cell: patch capacitance, resistance, inductance, transformer ratio."""

    cp: float = PATCH_CAPACITANCE
    r: float = 57.5
    l: float = 161.1e-3
    a: float = 1.0

    def __post_init__(self):
        if not (self.cp > 0 and self.r > 0 and self.l > 0):
            raise ModelError("cp, r and l must be positive")


def analog_cell_matrices(cfg):
    """
    5 x 5 capacitance, conductance and reluctance of one analog cell.

    Cell dof order: two left boundary dofs, the port, two right boundary
    dofs.
    """
    a = cfg.a
    port = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    g1 = np.array([-a, 1.0, -1.0, 0.0, 0.0])
    g2 = np.array([0.0, 0.0, -1.0, a, 1.0])
    b1 = np.array([1.0, 0.0, 0.0, -1.0, 0.0])
    c = 2 * cfg.cp * np.outer(port, port)
    g = (np.outer(g1, g1) + np.outer(g2, g2)) / cfg.r
    b = np.outer(b1, b1) / cfg.l
    return c, g, b


def analog_cell_dofs(i, n_cells):
    """Global dofs of cell ``i``: ports come first, then boundary nodes."""
    node = n_cells + 2 * i
    return [node, node + 1, i, node + 2, node + 3]


def build_analog_network(cfg=None, n_cells=20):
    """
    Chain ``n_cells`` analog cells into an :class:`ElectricalNetwork`.

    Neighbouring cells share their boundary dofs, so the network has
    ``3 n_cells + 2`` dofs with the ``n_cells`` ports first.
    """
    cfg = AnalogCellConfig() if cfg is None else cfg
    if n_cells < 1:
        raise ModelError("n_cells must be >= 1")
    ne = 3 * n_cells + 2
    c = np.zeros((ne, ne))
    g = np.zeros_like(c)
    b = np.zeros_like(c)
    cc, gc, bc = analog_cell_matrices(cfg)
    for i in range(n_cells):
        d = np.ix_(analog_cell_dofs(i, n_cells), analog_cell_dofs(i, n_cells))
        c[d] += cc
        g[d] += gc
        b[d] += bc
    e = np.zeros((ne, n_cells))
    e[np.arange(n_cells), np.arange(n_cells)] = 1.0
    return ElectricalNetwork(c, g, b, e, name=f"analog{n_cells}")
