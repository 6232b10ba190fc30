"""Concurrence of two-qubit mixtures, optimality certificates for mixtures of
real pure states, and entanglement in superposed dimerized states."""

from .concurrence import (SIGMA_YY, concurrence_mixed, concurrence_pure, rebit_concurrence,
                          spin_flip, werner_state, wootters_spectrum)
from .dimers import (DimerFactor, DimerizedSuperposition, OverlapProducts,
                     brute_force_reduced_dm, concurrence_sweep, normalization, overlaps,
                     random_superposition, reduced_dm_coherent, reduced_dm_incoherent)
from .errors import (DegenerateNorm, DependentEnsemble, DependentStates, EntmixError,
                     InvalidDensityMatrix, InvalidEnsemble, NonConvergence, NotReal,
                     NumericalFailure, ParallelStates, TooLarge, UsageError, WrongBranchCount,
                     ZeroVector)
from .optimality import (PairCertificate, TripleCertificate, certify_pair, certify_triple,
                         check_rank4, mixture_concurrence_k2, verify_optimality_numerically)
from .qstate import (DensityMatrix, GramMatrix, PureState, WeightedEnsemble, bell_states,
                     density_from_ensemble, ensemble_from_json, gram, is_independent, normalize)
from .quadrature import (AppendixResult, assemble, evaluate_appendix,
                         gram_schmidt_sign_invariance, integrate_f_d_ll, integrate_f_n_ll,
                         integrate_f_ul)
from .rmatrix import (CubicCoefficients, build_r, build_r_prime, cubic_coefficients,
                      verify_spectral_equivalence)
from .sampling import (McEstimate, estimate_f2, estimate_f3, estimate_mu_moments,
                       estimate_rank4_violations, estimate_rebit_fraction,
                       r12_distribution_check, sample_real_state)

__version__ = "0.1.0"
