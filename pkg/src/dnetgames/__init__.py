"""Public goods games on directed networks.

Best-response dynamics, network rescaling and classification, equilibrium
computation, best-response potentials and random-network cycle experiments.
"""

from .arith import UNBOUNDED
from .dynamics import (BRAD, BRCD, BRD, CycleCertified, Converged, Cyclic, DynamicSpec, HorizonExhausted,
                       RandomUniform, RoundRobin, Scripted, Trajectory, detect_cycle, run, step,
                       validate_schedule_regular, validate_update)
from .equilibrium import EquilibriumSet, check_uniqueness, solve_contraction, solve_enumerate
from .errors import (ConfigurationError, ConvergenceError, DomainError, IndeterminateError, NetGameError,
                     ParseError, PreconditionError, SizeError, WitnessError)
from .game import (BenefitSpec, Game, Network, best_response, is_nash, make_game, payoff,
                   unconstrained_best_response)
from .network import (ClassificationReport, RescaledNetwork, ScalingVector, brute_force_transitive, classify,
                      contraction_factor, dan_order, dan_scaling, has_amplifying_link, is_sign_symmetric,
                      is_weak_externalities, is_weak_influences, relative_importance, rescale,
                      scaling_for_weak_externalities, scaling_for_weak_influences, spectral_radius_abs,
                      symmetrize, weighted_max_norm)
from .potentials import (PotentialSpec, eval_rescaled_quadratic, eval_symmetric_quadratic, eval_weighted_l1,
                         verify_br_potential)
from .random_networks import (CycleWitness, RandomWeightModel, estimate_cycle_probability,
                              find_parasite_witness, find_three_group_witness, model_probabilities,
                              required_group_size, required_group_size_parasite, sample_network)

__version__ = "0.1.0"
