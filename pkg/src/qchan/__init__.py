"""Figures of merit for quantum measurements.

Numerics for finite-dimensional measurement channels: maximal added
variance, measurement infidelity, maximal disturbance, residual
coherence, and the sharp trade-off bounds connecting them.
"""

from qchan.operators import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    BlochVector,
    DensityMatrix,
    HermitianOperator,
    Projection,
    bloch_to_state,
    op_norm,
    spectral_projection,
    state_to_bloch,
    trace_distance,
)
from qchan.channels import (
    ChoiReport,
    Instrument,
    IsometryChannel,
    KrausMap,
    PointerObservable,
    choi_check,
    partial_trace,
    sesquilinear_form,
)
from qchan.metrics import (
    CoherencePair,
    DisturbanceConfig,
    DisturbanceEstimate,
    delta_disturbance,
    delta_infidelity,
    distance_to_center,
    residual_coherence,
    sigma2,
)
from qchan.bounds import (
    BoundReport,
    collapse_general_bound,
    collapse_general_check,
    collapse_unbiased_bound,
    collapse_unbiased_check,
    heisenberg_general_check,
    heisenberg_unbiased_check,
    joint_measurement_check,
)
from qchan.models import (
    BeamsplitterModel,
    FluorescenceModel,
    SharpnessFamily,
    beamsplitter_model,
    fluorescence_delta_bound,
    fluorescence_disturbance,
    fluorescence_exact,
    fluorescence_model,
    sharpness_instrument,
    von_neumann_instrument,
)
from qchan.randgen import (
    GenConfig,
    random_hermitian,
    random_instrument,
    random_pure_state,
)
from qchan.sweep import SweepConfig, manifest_json, run_sweep, violations
from qchan.figures import FigureSpec, figure_spec, write_figure_csv

__version__ = "0.1.0"

__all__ = [
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "BlochVector",
    "DensityMatrix",
    "HermitianOperator",
    "Projection",
    "bloch_to_state",
    "op_norm",
    "spectral_projection",
    "state_to_bloch",
    "trace_distance",
    "ChoiReport",
    "Instrument",
    "IsometryChannel",
    "KrausMap",
    "PointerObservable",
    "choi_check",
    "partial_trace",
    "sesquilinear_form",
    "CoherencePair",
    "DisturbanceConfig",
    "DisturbanceEstimate",
    "delta_disturbance",
    "delta_infidelity",
    "distance_to_center",
    "residual_coherence",
    "sigma2",
    "BoundReport",
    "collapse_general_bound",
    "collapse_general_check",
    "collapse_unbiased_bound",
    "collapse_unbiased_check",
    "heisenberg_general_check",
    "heisenberg_unbiased_check",
    "joint_measurement_check",
    "BeamsplitterModel",
    "FluorescenceModel",
    "SharpnessFamily",
    "beamsplitter_model",
    "fluorescence_delta_bound",
    "fluorescence_disturbance",
    "fluorescence_exact",
    "fluorescence_model",
    "sharpness_instrument",
    "von_neumann_instrument",
    "GenConfig",
    "random_hermitian",
    "random_instrument",
    "random_pure_state",
    "SweepConfig",
    "manifest_json",
    "run_sweep",
    "violations",
    "FigureSpec",
    "figure_spec",
    "write_figure_csv",
]
