"""Persistence probabilities of exchangeable walks and integrated birth-death chains."""

from .asymptotics import AsymptoticsSpec, PowerLawFit, c_alpha, c_prime_alpha, envelope, fit_power_law
from .chains import (
    BesselLikeSpec,
    BirthDeathChain,
    OddFunctional,
    classify_recurrence,
    make_bessel_like,
    simple_random_walk,
    simulate_path,
    tau1_tail,
)
from .combinatorics import PersistenceSequence, g_bounds, g_exact
from .exact_oracle import SignPermutationLaw, WeightVector, enumerate_persistence, srw_persistence_dp
from .persistence import PersistenceEstimate, PersistenceEstimator, estimate, sandwich_check
from .sampling import RandomStream

__version__ = "0.1.0"

__all__ = [
    "AsymptoticsSpec",
    "BesselLikeSpec",
    "BirthDeathChain",
    "OddFunctional",
    "PersistenceEstimate",
    "PersistenceEstimator",
    "PersistenceSequence",
    "PowerLawFit",
    "RandomStream",
    "SignPermutationLaw",
    "WeightVector",
    "c_alpha",
    "c_prime_alpha",
    "classify_recurrence",
    "enumerate_persistence",
    "envelope",
    "estimate",
    "fit_power_law",
    "g_bounds",
    "g_exact",
    "make_bessel_like",
    "sandwich_check",
    "simple_random_walk",
    "simulate_path",
    "srw_persistence_dp",
    "tau1_tail",
]
