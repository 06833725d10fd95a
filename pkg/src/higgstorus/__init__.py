"""Hodge calculus and Higgs-bundle curvature on flat Kahler tori."""

__version__ = "0.1.0"

from .lattice import LatticeChart, ScalarField
from .forms import ScalarForm, bar_star, hodge_star, inner_global, wedge
from .endforms import EndForm, MetricField, bar_star_h, trace_inner_global
from .higgs import HiggsInstance, build_example, check_higgs, mean_curvature
from .functionals import (
    FunctionalReport,
    flow_minimize,
    identity_residuals,
    kobayashi,
    lagrangian_density,
    residual_2k,
    sw_functional,
    ymh_full,
)
from .hitchin2d import SU2Config, hitchin_residual, sdym_residual, to_higgs_instance

__all__ = [
    "LatticeChart",
    "ScalarField",
    "ScalarForm",
    "EndForm",
    "MetricField",
    "HiggsInstance",
    "SU2Config",
    "FunctionalReport",
    "bar_star",
    "bar_star_h",
    "hodge_star",
    "inner_global",
    "trace_inner_global",
    "wedge",
    "check_higgs",
    "build_example",
    "mean_curvature",
    "ymh_full",
    "kobayashi",
    "sw_functional",
    "residual_2k",
    "identity_residuals",
    "lagrangian_density",
    "flow_minimize",
    "hitchin_residual",
    "sdym_residual",
    "to_higgs_instance",
]
