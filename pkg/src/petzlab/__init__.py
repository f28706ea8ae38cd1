"""Petz recovery maps for qubit and qudit channels."""

from .channels import (
    AffineMap,
    ChannelError,
    CPTPReport,
    KrausSet,
    SuperOperator,
    affine_from_channel,
    apply,
    choi_from_kraus,
    compose,
    dual,
    reshuffle,
    superop_from_kraus,
    verify_cptp,
)
from .metrics import choi_distance, non_unitality, relative_entropy, trace_distance, volume
from .petz import PetzMap, petz_map, recover, recoverability_defect, verify_petz
from .zoo import (
    amplitude_damping,
    amplitude_damping_nonuniform,
    dephasing,
    identity_channel,
    reference_state,
)

__version__ = "0.1.0"
