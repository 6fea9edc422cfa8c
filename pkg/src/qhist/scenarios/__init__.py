"""Executable worked examples; each returns a ScenarioReport."""

from .brownian import brownian_density, brownian_scenario
from .dragon import dragon_scenario
from .ensembles import ensemble_ambiguity_scenario, marginal_ambiguity_scenario
from .hardy import hardy_instance, hardy_scenario
from .report import Check, ErrorDemo, ScenarioReport
from .singlet import singlet_locality_scenario, singlet_locality_sweep

__all__ = [
    "Check",
    "ErrorDemo",
    "ScenarioReport",
    "brownian_density",
    "brownian_scenario",
    "dragon_scenario",
    "ensemble_ambiguity_scenario",
    "hardy_instance",
    "hardy_scenario",
    "marginal_ambiguity_scenario",
    "singlet_locality_scenario",
    "singlet_locality_sweep",
]
