"""Exact simulation and Magnus analysis of concatenated dynamical decoupling."""

from .harness import ExperimentConfig, preset, run_sweep, summarize
from .magnus import cdd_recursion, decompose, first_order_effective
from .operators import Axis, embed, expm_hermitian, partial_trace_bath, pauli, pauli_product, spectral_norm
from .propagation import JitterSpec, PulseConfig, evolve, run_trial
from .sequence import Schedule, build_cdd, build_pdd, simplify
from .spin_bath import SpinBathParams, build_he, random_product_state

__version__ = "0.1.0"
