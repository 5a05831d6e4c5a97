"""Exhaustive search over every admissible erasure map.

Only the images of the M*N constrained inputs {s} x ensemble bear on the
entropy accounting, and any injective choice of those images (all landing on
system = target) extends to a full bijection. So the search runs over
injections of M*N items into the 3**T environment states, i.e. k-permutations,
instead of over permutations of the whole joint space.

The stream is lexicographic. For parallel runs it is cut into contiguous
blocks by the value of the first image; block summaries merge with an
associative, commutative reduction, so the worker count never changes the
result.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .entropy import EntropyValue, landauer_delta
from .revmap import ErasureSpec, ReversibleMap, complete_assignment
from .statespace import JointState, ensemble_partition, macrostate_of

DEFAULT_BUDGET = 10**7

# Images of the constrained inputs, in ErasureSpec.constrained_domain() order
# (system-major, ensemble ascending). The system component is always the target.
ConstrainedAssignment = tuple[int, ...]


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        shown = str(required) if required < 10**15 else f"~10^{len(str(required)) - 1}"
        super().__init__(f"enumeration needs {shown} assignments, budget is {budget}")


def count_valid_assignments(spec: ErasureSpec) -> int:
    """Falling factorial 3**T (3**T - 1) ... (3**T - M*N + 1)."""
    return math.perm(3**spec.T, spec.M * spec.N)


def _check_budget(spec: ErasureSpec, budget: int | None) -> int:
    budget = DEFAULT_BUDGET if budget is None else budget
    n_env, k = 3**spec.T, spec.M * spec.N
    if k > n_env:
        raise ValueError(f"no injection of {k} constrained inputs into {n_env} environment states")
    required = count_valid_assignments(spec)
    if required > budget:
        raise BudgetExceeded(required, budget)
    return required


def enumerate_assignments(spec: ErasureSpec, budget: int | None = None) -> Iterator[ConstrainedAssignment]:
    """Every injective assignment exactly once, lexicographically.

    The budget is checked before the iterator is created, so a refusal never
    yields anything.
    """
    _check_budget(spec, budget)
    return itertools.permutations(range(3**spec.T), spec.M * spec.N)


def assignment_as_partial_map(a: ConstrainedAssignment, spec: ErasureSpec) -> dict[int, int]:
    space = spec.space
    return {
        space.flatten(js): space.flatten(JointState(spec.target, e))
        for js, e in zip(spec.constrained_domain(), a)
    }


def complete(a: ConstrainedAssignment, spec: ErasureSpec) -> ReversibleMap:
    """Full erasure map agreeing with ``a`` on the constrained inputs."""
    return complete_assignment(assignment_as_partial_map(a, spec), spec.M, spec.T)


def random_assignment(spec: ErasureSpec, rng: random.Random) -> ConstrainedAssignment:
    return tuple(rng.sample(range(3**spec.T), spec.M * spec.N))


# -- block scan ---------------------------------------------------------------


@dataclass
class BlockStats:
    examined: int = 0
    min_union: int | None = None
    witness: ConstrainedAssignment | None = None
    minimal_count: int = 0
    # branch-size exceptions: some initial state with != N images
    branch_exceptions: int = 0
    branch_witness: ConstrainedAssignment | None = None
    admissible: int = 0
    admissible_witness: ConstrainedAssignment | None = None
    # union straddles the ensemble class: final macrostate would reveal s
    leaking: int = 0
    leak_witness: ConstrainedAssignment | None = None
    # admissible but overlapping the ensemble, with information actually erased
    overlap_violations: int = 0
    overlap_witness: ConstrainedAssignment | None = None

    def merge(self, other: "BlockStats") -> "BlockStats":
        def first(a, b):
            if a is None:
                return b
            if b is None:
                return a
            return min(a, b)

        out = BlockStats(
            examined=self.examined + other.examined,
            branch_exceptions=self.branch_exceptions + other.branch_exceptions,
            branch_witness=first(self.branch_witness, other.branch_witness),
            admissible=self.admissible + other.admissible,
            admissible_witness=first(self.admissible_witness, other.admissible_witness),
            leaking=self.leaking + other.leaking,
            leak_witness=first(self.leak_witness, other.leak_witness),
            overlap_violations=self.overlap_violations + other.overlap_violations,
            overlap_witness=first(self.overlap_witness, other.overlap_witness),
        )
        candidates = [b for b in (self, other) if b.min_union is not None]
        if candidates:
            best = min(b.min_union for b in candidates)
            tied = [b for b in candidates if b.min_union == best]
            out.min_union = best
            out.witness = min(b.witness for b in tied)
            out.minimal_count = sum(b.minimal_count for b in tied)
        return out


def _scan_block(M: int, T: int, ensemble: tuple[int, ...], lo: int, hi: int) -> BlockStats:
    """Scan every assignment whose first image lies in [lo, hi)."""
    n_env, N = 3**T, len(ensemble)
    k = M * N
    in_ens = [False] * n_env
    for e in ensemble:
        in_ens[e] = True
    st = BlockStats()
    for first in range(lo, hi):
        rest = [e for e in range(n_env) if e != first]
        for tail in itertools.permutations(rest, k - 1):
            a = (first,) + tail
            st.examined += 1

            sizes = [len(set(a[s * N:(s + 1) * N])) for s in range(M)]
            if any(size != N for size in sizes):
                st.branch_exceptions += 1
                if st.branch_witness is None:
                    st.branch_witness = a

            union = set(a)
            u = len(union)
            if st.min_union is None or u < st.min_union:
                st.min_union, st.witness, st.minimal_count = u, a, 1
            elif u == st.min_union:
                st.minimal_count += 1

            inside = sum(in_ens[e] for e in union)
            if 0 < inside < u:
                st.leaking += 1
                if st.leak_witness is None:
                    st.leak_witness = a
                continue
            st.admissible += 1
            if st.admissible_witness is None:
                st.admissible_witness = a
            if inside and M > 1:
                st.overlap_violations += 1
                if st.overlap_witness is None:
                    st.overlap_witness = a
    return st


def _blocks(n_env: int, workers: int) -> list[tuple[int, int]]:
    n_blocks = min(n_env, max(1, workers) * 4)
    edges = [round(i * n_env / n_blocks) for i in range(n_blocks + 1)]
    return [(edges[i], edges[i + 1]) for i in range(n_blocks) if edges[i] < edges[i + 1]]


def scan(spec: ErasureSpec, budget: int | None = None, workers: int = 1) -> BlockStats:
    _check_budget(spec, budget)
    args = (spec.M, spec.T, tuple(spec.ensemble.sorted()))
    blocks = _blocks(3**spec.T, workers)
    if workers <= 1:
        parts = [_scan_block(*args, lo, hi) for lo, hi in blocks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan_block, *args, lo, hi) for lo, hi in blocks]
            parts = [f.result() for f in futures]
    total = BlockStats()
    for p in parts:
        total = total.merge(p)
    return total


# -- results ------------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    M: int
    T: int
    N: int
    maps_examined: int
    min_union: int
    witness: ConstrainedAssignment
    per_initial_state_sizes: tuple[int, ...]
    minimal_count: int
    stats: BlockStats = field(repr=False, compare=False)

    @property
    def delta(self) -> EntropyValue:
        return landauer_delta(self.N, self.min_union)


def min_final_env_union(
    spec: ErasureSpec, budget: int | None = None, workers: int = 1, stats: BlockStats | None = None
) -> OracleResult:
    """Smallest environment image set any erasure map can achieve."""
    st = scan(spec, budget, workers) if stats is None else stats
    N = spec.N
    w = st.witness
    sizes = tuple(len(set(w[s * N:(s + 1) * N])) for s in range(spec.M))
    return OracleResult(
        M=spec.M,
        T=spec.T,
        N=N,
        maps_examined=st.examined,
        min_union=st.min_union,
        witness=w,
        per_initial_state_sizes=sizes,
        minimal_count=st.minimal_count,
        stats=st,
    )


class Verdict(NamedTuple):
    ok: bool
    report: dict


def verify_state_independence(
    spec: ErasureSpec, budget: int | None = None, workers: int = 1, result: OracleResult | None = None
) -> Verdict:
    """Every initial state contributes N images, and the bound is the same for each.

    Since the final macrostate may not depend on which s occurred, it must hold
    the whole union; the bound ln|union| - ln N is then shared by every s.
    """
    r = result or min_final_env_union(spec, budget, workers)
    st = r.stats
    per_state_delta = [landauer_delta(spec.N, r.min_union).nats for _ in range(spec.M)]
    ok = st.branch_exceptions == 0 and len(set(per_state_delta)) == 1 and all(
        size == spec.N for size in r.per_initial_state_sizes
    )
    return Verdict(
        ok,
        {
            "assignments_checked": st.examined,
            "minimal_assignments": r.minimal_count,
            "exceptions": st.branch_exceptions,
            "exception_witness": st.branch_witness,
            "per_state_delta_nats": per_state_delta,
        },
    )


def verify_disjointness(
    spec: ErasureSpec,
    budget: int | None = None,
    workers: int = 1,
    result: OracleResult | None = None,
    partition=None,
) -> Verdict:
    """Final environment states of a genuine erasure avoid the initial macrostate.

    A configuration is admissible when the image union fits inside one class of
    some partition having the ensemble as a class: either inside the ensemble
    itself or wholly outside it. With M >= 2 the union has M*N > N members, so
    only the second option remains. Straddling unions are counted as leaks:
    the final macrostate would then tell which initial state occurred.
    """
    if partition is not None:
        spec.ensemble.check_against(partition)
    r = result or min_final_env_union(spec, budget, workers)
    st = r.stats

    # Re-derive the scan's classification of its first admissible case from an explicit partition.
    witness_ok = True
    if st.admissible_witness is not None:
        part = ensemble_partition(spec.ensemble, spec.T)
        witness_ok = len({macrostate_of(part, e) for e in st.admissible_witness}) == 1

    ok = st.overlap_violations == 0 and witness_ok
    return Verdict(
        ok,
        {
            "admissible": st.admissible,
            "admissible_witness": st.admissible_witness,
            "leaking": st.leaking,
            "leak_witness": st.leak_witness,
            "violations": st.overlap_violations,
            "violation_witness": st.overlap_witness,
        },
    )
