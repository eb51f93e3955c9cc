"""Rank aggregation with Mallows, Plackett-Luce and Normal random utility models.

Fit any of the three models to complete rankings, compare their predicted
pairwise preference probabilities with the empirical ones, and study how
fits degrade on progressively harder ranking tasks.
"""

from .analysis import (MODELS, DifficultySweep, FitReport, adjacent_pair_report, build_report,
                       compare_models, deviation_matrix, deviation_summary, difficulty_sweep,
                       fit_model, modal_ordering, model_nll, model_pairwise)
from .core import (Dataset, PairwiseMatrix, Ranking, as_ranking, empirical_pairwise,
                   kendall_tau, kendall_tau_to_all, permute_matrix)
from .errors import (CapacityError, DataError, DegenerateDataError, DegenerateLikelihoodWarning,
                     DimensionError, EmptyInputError, IntervalError, NumericalError, ParseError,
                     RankAggError, ValidationError)
from .heatmap import heatmap_emit, read_heatmap_csv
from .io import load_dataset, load_params, parse_csv, parse_soc, save_params, write_csv, write_soc
from .mallows import (MallowsParams, fit_mallows, fit_phi, kemeny_rank, mallows_nll,
                      mallows_pairwise, sample_mallows)
from .normal_rum import (MCEMConfig, NormalRUMParams, fit_normal_mcem, normal_nll,
                         normal_pairwise, normal_ranking_loglik, sample_normal_rum,
                         truncated_normal_sample)
from .plackett_luce import PLParams, fit_pl_mm, pl_nll, pl_pairwise, sample_pl
from .synth import SynthConfig, SynthLevel, synth_generate, write_synth

__version__ = "0.1.0"
