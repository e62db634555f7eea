"""Admissibility, Z_m^* witnesses and prime-point counts for systems of
affine-linear forms and single-variable polynomial systems."""

__version__ = "0.1.0"

from .integer_core import (NaturalRange, ResidueConstraint, crt_combine, euler_phi, in_Zm_star,
                           is_prime, primes_up_to)
from .linear_forms import (AffineForm, AdmissibilityReport, Domain, LinearSystem, UniPolySystem,
                           Verdict, evaluate, is_admissible, local_count, parse_system,
                           poly_is_admissible, poly_local_count, serialize_system)
from .residue_witness import (StrongAdmissibilityCertificate, WitnessCertificate,
                              certify_strong_admissibility, factorial_frame_scan, find_witness,
                              good_property_check, verify_corollary_band)
from .constructive_lemmas import (CoprimalityWitness, crt_isomorphism_check, lemma1_construct,
                                  lemma2_construct, select_coprime_column)
from .prime_search import (CountReport, PrimePoint, chain_system, enumerate_prime_points,
                           least_seed, omega_count, psi_count)
from .density import DensityEstimate, Normalization, compare, predicted_count, singular_series
