"""Sparse binary associative memory over clustered fanals.

Fixed-length messages are stored as cliques (or ring degenerations), symbol
sequences as looped chains of tournaments, vectorial sequences as chained
bipartite associations, optionally backed by a clique cleanup layer. The
``analytic`` module holds the closed-form counterparts and the ``experiments``
module the Monte-Carlo harness behind the ``cliquemem`` CLI.
"""
from .analytic import (
    capacity_seq,
    chi_opt,
    density_restricted,
    density_seq,
    density_seq_approx,
    dmin,
    efficiency_seq,
    memory_bits_seq,
    merit,
    pattern_bits,
    rate,
    solve_sequence_capacity,
    sqer_restricted,
    sqer_seq,
    structural_sber,
)
from .clique import decode_fixed, store_clique, store_ring
from .core import (
    ActivationState,
    ClusterLayout,
    ConnectionMatrix,
    DecoderSpec,
    InfeasibleConfigError,
    delta,
    message_passing,
    plain_sum_scores,
    sum_of_max_scores,
)
from .corpus import (
    DistortionSpec,
    distort_message,
    random_messages,
    random_symbol_sequences,
    random_vectorial_sequences,
)
from .duallayer import (
    DoubleLayerNetwork,
    clique_cleanup,
    decode_double,
    efficiency_double,
    efficiency_single,
    load_double,
    memory_bits_double,
    memory_bits_single,
    save_double,
    store_double,
)
from .experiments import ExperimentConfig, ResultRow, preset_config, run_experiment
from .rng import substream
from .tournament import (
    DecodedSequence,
    decode_sequence,
    sber,
    schedule_density,
    sequence_exact,
    sqer,
    store_sequence,
    store_sequences,
)
from .vectorial import (
    VectorialDecodeResult,
    decode_vectorial,
    pattern_error_rate,
    select,
    store_vectorial,
)

__version__ = "0.1.0"
