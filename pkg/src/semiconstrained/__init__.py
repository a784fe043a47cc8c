"""Semiconstrained systems: admissibility, capacity, encoders and essential graphs.

A semiconstrained system is a set Gamma of probability measures on the
length-k patterns over a finite alphabet; a word is admissible when its
empirical pattern frequencies lie in Gamma.  Gamma is given by linear
constraints with exact rational data.
"""
from .block import (BlockCode, block_decode, block_encode, block_rate, build_block_code,
                    min_block_length, verify_block_length)
from .capacity import (capacity_bounds, capacity_bruteforce, capacity_scs, conditional_entropy,
                       graph_capacity, spectral_radius)
from .constraints import (EQ, LE, LT, ConstraintSet, LinearConstraint, ToleranceFn,
                          count_admissible, enumerate_admissible, expand, forbidden_set,
                          is_admissible, is_fat, is_relatively_fat, is_weakly_admissible,
                          max_admissible_epsilon, shrink, tolerance_S, upper_bound_system)
from .counting import AdmissibleCounter
from .errors import (DecodeError, DimensionError, EulerianError, InfeasibleError, LengthError,
                     NotInLanguageError, RateInfeasibleError, ScsError, SpecParseError)
from .essential import (containing_capacity, essential_graph, prefix_completion,
                        zero_capacity_equiv)
from .graphs import (LabeledDigraph, MultiDigraph, debruijn, eulerian_cycle, measure_graph,
                     word_from_measure)
from .measure import Measure
from .sliding import (Encoder, build_sliding_encoder, build_window_system, encoder_decode,
                      encoder_encode, lifted_certificate)
from .specfile import Spec, parse_spec, read_spec
from .words import Alphabet, kmer_frequency, pattern_counts

__version__ = "0.1.0"

__all__ = [
    "AdmissibleCounter",
    "Alphabet",
    "block_decode",
    "block_encode",
    "block_rate",
    "BlockCode",
    "build_block_code",
    "build_sliding_encoder",
    "build_window_system",
    "capacity_bounds",
    "capacity_bruteforce",
    "capacity_scs",
    "conditional_entropy",
    "ConstraintSet",
    "containing_capacity",
    "count_admissible",
    "debruijn",
    "DecodeError",
    "DimensionError",
    "Encoder",
    "encoder_decode",
    "encoder_encode",
    "enumerate_admissible",
    "EQ",
    "essential_graph",
    "eulerian_cycle",
    "EulerianError",
    "expand",
    "forbidden_set",
    "graph_capacity",
    "InfeasibleError",
    "is_admissible",
    "is_fat",
    "is_relatively_fat",
    "is_weakly_admissible",
    "kmer_frequency",
    "LabeledDigraph",
    "LE",
    "LengthError",
    "lifted_certificate",
    "LinearConstraint",
    "LT",
    "max_admissible_epsilon",
    "Measure",
    "measure_graph",
    "min_block_length",
    "MultiDigraph",
    "NotInLanguageError",
    "parse_spec",
    "pattern_counts",
    "prefix_completion",
    "RateInfeasibleError",
    "read_spec",
    "ScsError",
    "shrink",
    "Spec",
    "SpecParseError",
    "spectral_radius",
    "tolerance_S",
    "ToleranceFn",
    "upper_bound_system",
    "verify_block_length",
    "word_from_measure",
    "zero_capacity_equiv",
]
