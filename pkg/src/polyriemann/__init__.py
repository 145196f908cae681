"""Exact Riemann solutions for a polymer-flooding system with adsorption."""
from .model import NO_ADSORPTION, Adsorption, FluxModel, State
from .riemann import RiemannSolution, Wave, l1_distance, solve_m0, solve_malpha, validate

__all__ = [
    "Adsorption",
    "FluxModel",
    "NO_ADSORPTION",
    "RiemannSolution",
    "State",
    "Wave",
    "l1_distance",
    "solve_m0",
    "solve_malpha",
    "validate",
]
__version__ = "0.1.0"
