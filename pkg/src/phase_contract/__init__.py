"""Phase-space (Wigner) kernels for a spin and a particle, and the contraction of one into the other."""

from ._backend import get_backend, has_compiled, kernels
from .contraction import (
    ContractionScale,
    SweepReport,
    TermTable,
    contracted_operators,
    contracted_rotation,
    contraction_sum,
    diagonal_limit,
    epsilon_sweep,
    kernel_block_compare,
    lambda_recursion,
    laguerre_integral,
    term_delta,
)
from .errors import (
    AngleOverflowWarning,
    BandlimitError,
    DomainError,
    PreconditionError,
    QuadratureError,
    TruncationWarning,
)
from .numbers import HalfInt, LogDomainReal, SqrtRational, half
from .particle_kernel import (
    FockSpace,
    PhasePoint,
    displacement,
    parity,
    particle_kernel,
    wigner_function,
    wigner_integral_check,
)
from .special_functions import (
    SpherePoint,
    clebsch_gordan,
    clebsch_gordan_float,
    laguerre,
    rotation_matrix,
    spherical_harmonic,
    spin_matrices,
    wigner_small_d,
)
from .spin_kernel import (
    AuditReport,
    SignPattern,
    SphereGrid,
    SphereSamples,
    SpinKernel,
    audit_postulates,
    kernel_at,
    kernel_coefficient,
    kernel_diagonal,
    kernel_via_rotation,
    pi_s,
    reconstruct_operator,
    sample_symbol,
    wigner_symbol,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
