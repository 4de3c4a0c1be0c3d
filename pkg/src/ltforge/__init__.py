"""Lubin-Tate formal groups over p-adic fields at finite precision:
truncated series algebra, field-of-norms dynamics with its unit action,
Frobenius-compatible lifts, and recovery of the acting unit from an
equivariant perfectoid series.
"""

from .padic import (
    LocalFieldSpec,
    OFElement,
    FqElement,
    teichmuller,
    uniformizer,
    load_preset,
    preset_names,
    spec_from_config,
)

__all__ = [
    "LocalFieldSpec",
    "OFElement",
    "FqElement",
    "teichmuller",
    "uniformizer",
    "load_preset",
    "preset_names",
    "spec_from_config",
]

__version__ = "0.1.0"
