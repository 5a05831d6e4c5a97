"""Finite reversible-map laboratory for Landauer's erasure bound."""

from .entropy import BOLTZMANN_K, EntropyValue, boltzmann_entropy, landauer_delta, shannon_entropy, to_si
from .oracle import (
    BudgetExceeded,
    OracleResult,
    count_valid_assignments,
    enumerate_assignments,
    min_final_env_union,
    verify_disjointness,
    verify_state_independence,
)
from .revmap import (
    ErasureSpec,
    ReversibleMap,
    apply,
    canonical_erasure_map,
    compose,
    erasure_condition_holds,
    image_env_sets,
    invert,
    validate_bijection,
)
from .statespace import (
    InitialEnsemble,
    JointSpace,
    JointState,
    MacroPartition,
    SystemState,
    TritString,
    decode_trits,
    encode_trits,
    macrostate_of,
    make_partition,
)

__version__ = "0.1.0"
