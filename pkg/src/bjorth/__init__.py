"""Certified Birkhoff-James, quasi-strong and strong orthogonality in Hilbert
C*-modules over finite-dimensional C*-algebras."""
from __future__ import annotations

__version__ = "0.1.0"

from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    PureState,
    StateMixture,
    is_commutative,
    operator_norm,
    pure_states_of,
    spectral_decomposition,
    state_evaluate,
)
from .constructions import (
    PrimeCounterexample,
    SqcCounterexample,
    make_prime_pair,
    make_quasi_pair,
    make_sqc_pair,
    verify_max_norm_formula,
)
from .errors import (
    AlgebraMismatch,
    BJOError,
    CommutativeAlgebra,
    ConfigError,
    DegenerateSample,
    EmptyInput,
    NotDisjoint,
    NotEnoughBlocks,
    NotPositive,
    NotSelfAdjoint,
    ParseError,
    ShapeError,
    SpaceMismatch,
    ToleranceError,
)
from .interchange import ProblemFile
from .module import ModuleElement, ModuleSpace, inner_product, module_norm, right_action
from .numrange import Answer, CertifiedBool, EigenFrame, compress, contains_zero, top_eigenframe
from .orthogonality import (
    FailureCertificate,
    QuasiObstruction,
    Relation,
    Verdict,
    bj_module_algebra_consistency,
    check,
    classify_pair,
    is_bj,
    is_bj_minimization,
    is_quasi_strong,
    is_strong,
    replay_certificate,
    replay_witness,
    strong_definitional_probe,
)
from .sampling import sample_element, spawn_rng
from .survey import EnsembleConfig, SurveyReport, run_equivalence_survey, run_implication_survey
from .tolerances import DEFAULT, Tolerances
