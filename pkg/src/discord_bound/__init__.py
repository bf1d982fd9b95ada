"""Classical correlations, quantum discord and a numerical audit of the
dilation argument bounding classical correlations by marginal entropies."""

from discord_bound.linalg import (
    complete_to_unitary,
    hermitian_eigensystem,
    partial_trace,
    tensor_product,
)
from discord_bound.states import DensityMatrix, family, from_matrix, pure_from_vector
from discord_bound.measurement import (
    ConditionalEnsemble,
    ProjectiveMeasurement,
    Povm,
    condition_on_b,
    fixed_measurement_classical_info,
)
from discord_bound.correlations import (
    CorrelationReport,
    mutual_information,
    optimize_classical_correlations,
    quantum_discord,
    shannon_entropy,
    von_neumann_entropy,
)
from discord_bound.dilation import (
    build_proof_trace,
    neumark_extend,
    stinespring_dilate,
    verify_proof,
)

__version__ = "0.1.0"
