"""Mode-dispatching constructor."""

from __future__ import annotations

from .base import RackAwareCode
from .gf import Field
from .mbrr import MbrrCode
from .msrr import MsrrCode
from .params import CodeParams, Mode


def build_code(mode: Mode | str, params: CodeParams, field: Field | None = None) -> RackAwareCode:
    cls = MsrrCode if Mode(mode) is Mode.MSRR else MbrrCode
    return cls(params, field)
