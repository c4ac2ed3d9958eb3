"""Certified numerics for the Fourier transform from L^p into the Lorentz
space L^{p',p}: exact rearrangements, c_p brackets, lacunary witness
families, min-ratio probes and the torus analogue."""
from .errors import DomainError, FeatureError, UncertifiedError, UnresolvedError, ValidationError
from .fourier import (
    DEFAULT_RESOLUTION,
    ReferenceProfile,
    Resolution,
    SincProfile,
    eval_ft_indicator,
    reference_profile,
    scaled_lorentz_identity_check,
)
from .kernels import BACKEND
from .lorentz import (
    Bracket,
    LorentzIndex,
    MagnitudeSequence,
    lorentz_norm_enclosure,
    lorentz_norm_step,
    lp_norm_pc,
    sequence_lorentz_norm,
)
from .measure import (
    GridEnclosure,
    PiecewiseConstantFn,
    RearrangementEnclosure,
    StepRearrangement,
    dilate_pc,
    distribution_pc,
    rearrange_enclosure,
    rearrange_pc,
)
from .probe import (
    CoefficientVector,
    RatioReport,
    assemble_pc,
    chain_lower_bound,
    decay_exponent,
    direct_lorentz_norm,
    min_ratio,
    upper_estimate,
)
from .torus import coefficient_sequence, convergence_study, discrepancy, fourier_coefficient
from .witness import (
    WitnessFamily,
    WitnessLevel,
    build_family,
    find_eta,
    find_frequency_window,
    find_rearrangement_window,
    next_scale,
)

__version__ = "0.1.0"
