"""Ambiguous online learning: set-valued hypotheses and predictions, exact
minimax analysis, and the learners that attain it."""

from .core import (HypothesisClass, MistakeRecord, enumerate_classes, enumerate_compatible_traces,
                   is_compatible, labelset, load_class, make_class, members, mistakes,
                   random_class)
from .dimensions import (al_dimension, al_witness_tree, game_value, littlestone_tree,
                         partial_littlestone)
from .exceptions import *  # noqa: F401,F403
from .game import (expected_mistakes, mistake_curve, randomized_tree_adversary_run, run_trace,
                   tree_adversary_run, worst_case_mistakes, worst_case_search)
from .lattice import (Lattice, gen_box, hull, lambda_complexity, lattice_closure, lattice_length,
                      pivot_dimension, vc_dimension)
from .learners import (AOALearner, FullLearner, HullMemorizer, ThresholdMixture, UniformLearner,
                       WAALearner, PointMass, aoa_predict, make_learner, waa_predict)
from .reductions import (apple_game_value, apple_tree_adversary_run, apple_worst_case, apple_wrap,
                         build_HN, lifted_waa_predict, soa_predict, to_apple_ambiguous)
from .trees import (AmbiguousTree, ClassicalTree, compact, gen_fin_deltas, gen_many_labels,
                    gen_small_al, rank, reduce_arity, trim_frugal, trim_uniform_rank, validate)

__version__ = "0.1.0"
