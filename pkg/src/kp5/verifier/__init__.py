"""Exact counting and randomized estimate checks for the dyadic machinery."""

from .blocks import BlockFunction, LatticeWindow, conv_block_norm, trilinear_form
from .counting import CountReport, Interval, count_monotone, count_parabola
from .estimates import EstimateReport, check_estimate
from .resonant import enumerate_resonant_set, resonance_gradient_check

__all__ = [
    "BlockFunction",
    "CountReport",
    "EstimateReport",
    "Interval",
    "LatticeWindow",
    "check_estimate",
    "conv_block_norm",
    "count_monotone",
    "count_parabola",
    "enumerate_resonant_set",
    "resonance_gradient_check",
    "trilinear_form",
]
