"""Simulation, homodyne tomography and analysis of heralded optical cat states."""

from .analysis import (
    best_cat_axis,
    cat_fit_sweep,
    fidelity,
    fit_four_component_cat,
    fit_two_component_cat,
    mean_photon_number,
    photon_number_distribution,
    purity,
    trace_distance,
    wigner,
    wigner_origin,
)
from .channels import (
    DetectorModel,
    apply_beam_splitter,
    beam_splitter_projection,
    beam_splitter_unitary,
    fcc_synthesis,
    ideal_photon_subtraction,
    loss_channel,
    loss_kraus,
    tap_and_herald,
)
from .errors import CatlabError
from .fock import DensityOperator, LinearOperator, StateVector, partial_trace, tensor_product
from .homodyne import QuadratureDataset, quadrature_pdf, read_dataset, sample_dataset, write_dataset
from .io import read_density, write_density
from .pipeline import (
    ExperimentConfig,
    cmd_analyze,
    cmd_end2end,
    cmd_fcc,
    cmd_reconstruct,
    cmd_sample,
    cmd_simulate,
    verify_manifest,
)
from .states import (
    CatSpec,
    GaussianNoiseSpec,
    SqueezingSpec,
    coherent,
    four_component_cat,
    odd_cat,
    photon_subtracted_squeezed,
    squeezed_thermal_from_db,
    squeezed_vacuum,
    two_mode_squeezed_vacuum,
)
from .tomography import TomographyConfig, mle_reconstruct

__version__ = "0.1.0"
