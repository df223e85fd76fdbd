"""
Modal-based synthesis of passive multi-port electrical networks for
multimodal piezoelectric shunt damping.
"""

from .beam import (
    AnalogCellConfig,
    BeamConfig,
    build_analog_network,
    build_beam,
    contiguous_groups,
)
from .bundle import export_model, export_network, import_model, import_network
from .frf import (
    SweepConfig,
    attenuation,
    band_local_maxima,
    band_peak,
    coupled_frf,
    frequency_grid,
    read_frf_csv,
    sdof_demo,
    sdof_model,
    sdof_shunt,
    sdof_sweep,
    write_frf_csv,
)
from .modal import (
    CouplingTable,
    auto_mac,
    conductance_offdiag_residual,
    coupling_coefficients,
    open_short_eemcf,
    orthogonality_residuals,
    solve_modes,
)
from .model import (
    ElectricalNetwork,
    FrfResult,
    ModalBasis,
    ModelError,
    NumericalError,
    PiezoStructureModel,
    SingularModeShapeError,
    SynthesisConfig,
    SynthesisError,
    UncontrollableModeError,
    port_localization,
)
from .scenario import ScenarioError, load_scenario
from .synthesis import (
    ModalTuning,
    ModeShapeSet,
    PassivityReport,
    Synthesis,
    check_passivity,
    determinant_identity,
    modal_tuning,
    optimal_shape_single,
    scale_shapes,
    synthesize,
    yamada_sdof,
)

__version__ = "0.1.0"
