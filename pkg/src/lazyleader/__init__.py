"""Follow-the-perturbed-leader forecasters with random-walk perturbations.

The random-walk forecaster changes its action rarely (order sqrt(n) times in
n rounds) while keeping order sqrt(n log N) regret.  The package contains the
forecasters, classical baselines, a combinatorial variant with exact linear
oracles, closed-form bounds and a Monte Carlo harness.
"""

from .adversaries import AdversarySpec, generate
from .baselines import Hedge, IIDFPL, ShrinkingDartboard, StaticFPL, run_baseline_batch
from .bounds import (
    BoundReport,
    lemma2_bound,
    lower_bound,
    pmf_ratio,
    pmf_ratio_factorial,
    thm1_bound,
    thm1_switch_bound,
    thm2_regret_bound,
    thm2_regret_bound_tuned,
    thm2_switch_bound,
)
from .combinatorial import DagPathSet, ExplicitSet, LossVectorSequence, MSetFamily, dag_oracle, load_dag
from .core import BatchResult, ContractError, DomainError, LossMatrix, RunRecord, regret, switch_count
from .harness import (
    ExperimentConfig,
    StatSummary,
    run_experiment,
    verify_be_the_leader,
    verify_pathwise_lemma1,
)
from .rng import RngStream
from .rwfpl import RandomWalkFPL, lead_pack, run_rwfpl, run_rwfpl_batch, rw_step

__version__ = "0.1.0"
