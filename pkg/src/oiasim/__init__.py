"""Opportunistic interference alignment in the three-transmitter M x 2M MIMO interference channel."""

__version__ = "0.1.0"

from .channel import (  # noqa: E402
    SystemConfig,
    UserChannels,
    achievable_rate,
    capacity_joint,
    draw_group,
    interference_gram,
    rate_minus,
    rate_plus,
)
from .complexity import FlopOp, complexity_ratio, op_flops, scheme_flops  # noqa: E402
from .grassmann import (  # noqa: E402
    DistortionBoundParams,
    chordal_distance_sq,
    min_chordal_statistic,
    min_tail_eigensum,
    pair_gram_spectrum,
    principal_angles,
    quantization_bound,
    rotation_onto,
)
from .linalg import hermitian_eigen, orthonormal_basis, random_gaussian_matrix  # noqa: E402
from .schemes import SchemeId, SchemeOutcome, run_scheme, select_user  # noqa: E402
from .simulate import SweepResult, SweepSpec, dof_slope, interference_free_reference, run_sweep  # noqa: E402
