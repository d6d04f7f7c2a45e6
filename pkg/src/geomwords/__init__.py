"""Inversions and Knuth's in-situ parameter on words of i.i.d. geometric letters."""
from .closed_forms import (
    MomentReport,
    closed_form_moments,
    knuth_second_factorial_moment,
    mean_inversions,
    mean_knuth,
    permutation_limit_moments,
    variance_inversions,
    variance_knuth,
)
from .law import DomainError, GeometricLaw
from .oracle import CapacityError, distribution, weak_order_moments
from .words import Word, inversions, knuth_a, weak_order_pattern

__version__ = "0.1.0"
