"""Exact and approximate learning from random counter-examples."""

from .arbitrary import SelectionStrategy, run_arbitrary, select
from .core import (
    ConceptError,
    CounterExample,
    ExampleDistribution,
    HypothesisMatrix,
    TargetPrior,
    Transcript,
    conditional_distribution,
    difference_set,
    eliminate,
    make_rng,
    sample_column,
    validate,
)
from .majority import best_majority_hypothesis, compute_majority, run_majority
from .randomized import Posterior, posterior_update, run_randomized
from .teacher import TeacherConfig, epsilon_bad, respond

__version__ = "0.1.0"
