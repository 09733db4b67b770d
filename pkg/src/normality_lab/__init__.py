"""Finite-state selection from binary sequences, exact Bernoulli measures, and normality estimators."""

from .automata import (Dfa, DfaFormatError, SelectionResult, compose, every_cycle_hits_accepting,
                       is_strongly_connected, max_accept_gap, select, select_stream,
                       sliding_window_dfa)
from .generators import SourceSpec, bernoulli_source, generate, open_source, parse_source
from .markov import (StationaryDistribution, TransitionMatrix, VisitStats, induce_matrix,
                     is_irreducible, min_accepting_mass, period, simulate_trajectory, stationary)
from .measure import BernoulliParam, mu_set, mu_word, parse_rational, prefix_free_reduce
from .normality import (BlockSelectionStats, FrequencyReport, freq_block, freq_caterpillar,
                        freq_copeland, freq_postnikov, freq_word, theorem_demo)
from .strategies import Strategy, apply_strategy, dfa_strategy, suffix_strategy
from .verify import (SetSpec, TrendReport, enumerate_set, verify_lemma1, verify_lemma2,
                     verify_lemma3, verify_mainclaim, verify_partition)
from .words import BlockView, Word, block_decompose, count_occurrences, is_prefix

__version__ = "0.1.0"
