"""Non-adaptive measurement-based computation with XOR side-processing."""

from .boolfn import (AnfPolynomial, BooleanFunction, ParityDecomposition, WalshSpectrum,
                     anf_of, degree, parse_anf, parity_decomposition, walsh_spectrum)
from .bounds import (BellFunctional, BoundsReport, OptimizerConfig, PriorDistribution,
                     classical_bound, functional_from_game, game_from_functional,
                     mean_success_from_bound, quantum_bound)
from .dyadic import Dyadic
from .families import FamilySpec, closed_form_bounds, make_family, verify_suite
from .gf2 import Gf2Matrix
from .sim import GhzResource, NsBoxResource, success_probability
from .synth import (FeasibilityVerdict, Protocol, decide_feasibility, minimal_sites_search,
                    synthesize_protocol, verify_deterministic)

__version__ = "0.1.0"
