"""Toda hierarchy on finite truncations: banded operator algebra, coadjoint
machinery, Flaschka maps, closed-form spectral solution and dense oracles."""

from .diag_algebra import DiagSeq, shift, trace_pair
from .multidiag_algebra import (
    GroupElement,
    NotInvertibleError,
    UpperBanded,
    as_group,
    bracket_k,
    circ_k,
    exp_k,
    identity,
    inverse_k,
    is_invertible,
)
from .lie_poisson import (
    BidiagLower,
    LowerBanded,
    bidiagonal_hamilton_rhs,
    coadjoint_algebra,
    coadjoint_group,
    orbit_form_bidiagonal,
    poisson_bracket_linear,
)
from .flaschka import (
    NuWeight,
    PhasePoint,
    PhasePoint3,
    action3,
    canonical_bracket,
    flaschka3,
    flaschka_k,
    flaschka_map,
    hamiltonians_k3,
    linear_gradient,
    omega3_matrix,
    omega_eval,
    rk4_k3,
    sigma_action,
    toda_hamiltonian,
)
from .spectral_solver import (
    DegenerateSpectrumError,
    InvalidMomentsError,
    JacobiBanded,
    MomentSeq,
    PoleError,
    SpectralData,
    SplitBlockError,
    eigenbasis_change,
    evolve_spectral,
    group_element,
    jacobi_from_moments,
    jacobi_from_spectral,
    lower_flow,
    moments,
    orthopoly,
    reconstruct_from_group,
    spectral_decompose,
    tau_eval,
    toda_solve,
    weyl_eval,
    weyl_laurent,
)
from .lax_oracle import build_generator, casimir, qr_flow, rk4_lax

__version__ = "0.1.0"
