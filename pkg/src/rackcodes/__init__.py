"""Rack-aware regenerating codes tolerating multiple failures per rack.

Two explicit constructions over a finite field: :class:`MsrrCode` (minimum
storage, alpha = 1) and :class:`MbrrCode` (minimum bandwidth, alpha = dbar),
with systematic encoders, reconstruction from any k nodes and repair of up to
u - l failures in one rack from l local nodes and dbar helper racks.
"""

from .codes import build_code
from .errors import (ChunkFormatError, InconsistentDataError, InsufficientDataError, ParameterError,
                     RackCodeError, SingularMatrixError, UnrecoverableError)
from .gf import FieldSpec, binary_field, default_field, make_field, prime_field
from .mbrr import MbrrCode
from .msrr import MsrrCode
from .params import CodeParams, DerivedParams, Mode, cutset_bound, derive, flowgraph_mincut
from .rack_sim import Cluster, FailurePattern, RepairClass, RepairReport, classify

__all__ = [
    "build_code", "ChunkFormatError", "InconsistentDataError", "InsufficientDataError", "ParameterError",
    "RackCodeError", "SingularMatrixError", "UnrecoverableError", "FieldSpec", "binary_field",
    "default_field", "make_field", "prime_field", "MbrrCode", "MsrrCode", "CodeParams", "DerivedParams",
    "Mode", "cutset_bound", "derive", "flowgraph_mincut", "Cluster", "FailurePattern", "RepairClass",
    "RepairReport", "classify",
]
