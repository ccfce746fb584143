"""Polynomial approximation laboratory in weighted L^2 on the unit disk."""

from ._p2mu import (
    alpha_moments,
    envelope,
    fat_cantor_stage,
    herglotz_arc,
    predict,
    radial_check,
    run_scenario,
    set_precision,
    variation_check,
)

__all__ = [
    "alpha_moments",
    "envelope",
    "fat_cantor_stage",
    "herglotz_arc",
    "predict",
    "radial_check",
    "run_scenario",
    "set_precision",
    "variation_check",
]
