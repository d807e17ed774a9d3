"""Anyonic charge decoherence in Mach-Zehnder interferometry."""

from .algebra import (
    AnyonModel,
    ChargeLabel,
    FusionVertex,
    ModelError,
    VerificationReport,
    difference_channels,
    make_model,
    monodromy,
    verify_model,
)
from .interferometry import (
    BeamSplitter,
    DifferenceChannelMatrix,
    InterferometerConfig,
    PairBasisMatrix,
    ProbeSpec,
    TargetState,
    asymptotic,
    channel_factor,
    decompose_initial,
    evolve,
    stray_anyon_pass,
)
from .models import builtin_model, load_model, serialize
from .oracle import (
    binomial_channel_factor,
    check_density_matrix,
    closed_form_vs_oracle,
    path_enumeration_factor,
)

__all__ = [
    "AnyonModel", "ChargeLabel", "FusionVertex", "ModelError", "VerificationReport",
    "difference_channels", "make_model", "monodromy", "verify_model",
    "BeamSplitter", "DifferenceChannelMatrix", "InterferometerConfig", "PairBasisMatrix",
    "ProbeSpec", "TargetState", "asymptotic", "channel_factor", "decompose_initial",
    "evolve", "stray_anyon_pass",
    "builtin_model", "load_model", "serialize",
    "binomial_channel_factor", "check_density_matrix", "closed_form_vs_oracle",
    "path_enumeration_factor",
]
