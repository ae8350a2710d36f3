"""Correlation-tensor dynamics toolkit for 2- and 3-qubit spin systems."""

__version__ = "0.1.0"

from .dynamics import (
    FrequencySpectrum,
    GeneratorMatrix,
    Propagator,
    analytic_frequencies,
    correlation_vector_2q,
    frequencies,
    generator,
    generator_2q,
    generator_3q,
    is_periodic,
    max_tab_analytic,
    propagate,
    region_check_2q,
    sector_lengths_3q,
    tab_analytic,
    trajectory,
)
from .models import (
    CouplingTensor,
    coupling_3q,
    coupling_dm,
    coupling_general,
    coupling_ksea,
    coupling_xyz,
)
from .pauli import (
    CorrelationTensor,
    density_from_tensor,
    epsilon,
    pauli_product,
    pauli_word_matrix,
    tensor_from_density,
    theta,
)
from .states import (
    basis_state,
    bell_diagonal,
    local_cycle,
    partial_transpose_b,
    purity,
    random_mixture,
    random_pure,
    schmidt_from_tab,
)
from .stationary import (
    NullspaceBasis,
    PositivityReport,
    StationaryFamily,
    cubic_real_roots,
    documented_family,
    family_from_nullspace,
    gamel_check,
    nullspace,
    positivity_region_membership,
    tetrahedron_vertices,
    verify_stationary,
)
