"""Reversible maps on the joint system x environment space and the erasure protocol."""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .statespace import (
    DomainError,
    InitialEnsemble,
    JointSpace,
    JointState,
    decode_trits,
    encode_trits,
    env_size,
)


class InvertibilityError(ValueError):
    """Candidate image sequence is not a permutation."""


class CompositionError(ValueError):
    pass


class SpecError(ValueError):
    """Erasure configuration violates a structural precondition."""


class ContractError(RuntimeError):
    pass


class MapFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ReversibleMap:
    """A bijection on [0, M * 3**T), stored as its image sequence."""

    M: int
    T: int
    image: tuple[int, ...] = field(repr=False)

    @property
    def space(self) -> JointSpace:
        return JointSpace(self.M, self.T)

    @property
    def size(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i]

    def apply(self, s: JointState) -> JointState:
        space = self.space
        return space.unflatten(self.image[space.flatten(s)])

    @classmethod
    def identity(cls, M: int, T: int) -> "ReversibleMap":
        return cls(M, T, tuple(range(M * env_size(T))))


def validate_bijection(candidate: Sequence[int], M: int, T: int) -> ReversibleMap:
    n = JointSpace(M, T).size
    image = tuple(int(j) for j in candidate)
    if len(image) != n:
        raise InvertibilityError(f"expected {n} images, got {len(image)}")
    counts = Counter(image)
    duplicated = sorted(j for j, c in counts.items() if c > 1)
    missing = sorted(set(range(n)) - counts.keys())
    out_of_range = sorted(j for j in counts if not 0 <= j < n)
    if duplicated or missing or out_of_range:
        parts = []
        if duplicated:
            parts.append(f"duplicated {duplicated}")
        if missing:
            parts.append(f"missing {missing}")
        if out_of_range:
            parts.append(f"out of range {out_of_range}")
        raise InvertibilityError("not a permutation: " + "; ".join(parts))
    return ReversibleMap(M, T, image)


def apply(f: ReversibleMap, s: JointState) -> JointState:
    return f.apply(s)


def invert(f: ReversibleMap) -> ReversibleMap:
    inv = [0] * f.size
    for i, j in enumerate(f.image):
        inv[j] = i
    return ReversibleMap(f.M, f.T, tuple(inv))


def compose(f: ReversibleMap, g: ReversibleMap) -> ReversibleMap:
    """f after g: x -> f(g(x))."""
    if (f.M, f.T) != (g.M, g.T):
        raise CompositionError(f"cannot compose maps on (M={f.M},T={f.T}) and (M={g.M},T={g.T})")
    return ReversibleMap(f.M, f.T, tuple(f.image[j] for j in g.image))


# -- erasure specification ------------------------------------------------------


def record_width(M: int) -> int:
    """Trits needed to hold M record values plus the distinct all-2 blank."""
    R = 0
    while 3**R < M + 1:
        R += 1
    return R


def set_register(e: int, T: int, positions: Sequence[int], value: int) -> int:
    """Overwrite the trits at ``positions`` with the radix-3 digits of ``value``."""
    trits = list(decode_trits(e, T))
    digits = decode_trits(value, len(positions)).trits
    for pos, d in zip(positions, digits):
        trits[pos] = d
    return encode_trits(trits)


def read_register(e: int, T: int, positions: Sequence[int]) -> int:
    trits = decode_trits(e, T).trits
    return encode_trits([trits[p] for p in positions])


@dataclass(frozen=True)
class ErasureSpec:
    M: int
    T: int
    record_positions: tuple[int, ...]
    ensemble: InitialEnsemble
    target: int = 0

    def __post_init__(self):
        object.__setattr__(self, "record_positions", tuple(self.record_positions))
        if self.M < 1:
            raise SpecError(f"system dimension must be >= 1, got {self.M}")
        if self.T < 0:
            raise SpecError(f"trit count must be >= 0, got {self.T}")
        if not 0 <= self.target < self.M:
            raise SpecError(f"reset target {self.target} outside [0, {self.M})")
        R = record_width(self.M)
        pos = self.record_positions
        if len(pos) != R:
            raise SpecError(f"M={self.M} needs a {R}-trit record register, got positions {list(pos)}")
        if len(set(pos)) != len(pos) or any(not 0 <= p < self.T for p in pos):
            raise SpecError(f"record positions {list(pos)} must be distinct and in [0, {self.T})")
        n_env = 3**self.T
        blank = 3**R - 1
        for e in self.ensemble.sorted():
            if not 0 <= e < n_env:
                raise SpecError(f"ensemble member {e} outside [0, 3**{self.T})")
            if read_register(e, self.T, pos) != blank:
                raise SpecError(
                    f"ensemble member {e} = {list(decode_trits(e, self.T))} "
                    f"does not have its record register {list(pos)} at all-2"
                )

    @property
    def N(self) -> int:
        return self.ensemble.N

    @property
    def R(self) -> int:
        return len(self.record_positions)

    @property
    def space(self) -> JointSpace:
        return JointSpace(self.M, self.T)

    def constrained_domain(self) -> list[JointState]:
        """Every (system state, ensemble member) pair, system-major."""
        members = self.ensemble.sorted()
        return [JointState(s, e) for s in range(self.M) for e in members]

    @classmethod
    def build(
        cls,
        M: int = 2,
        T: int = 1,
        N: int = 1,
        record_positions: Sequence[int] | None = None,
        target: int = 0,
        ensemble: Iterable[int] | None = None,
    ) -> "ErasureSpec":
        """Spec with defaults: register at the leading trits, ensemble = first N blank-register states."""
        R = record_width(M)
        if record_positions is None:
            if R > T:
                raise SpecError(f"M={M} needs {R} record trit(s) but only T={T} available")
            record_positions = tuple(range(R))
        if ensemble is None:
            if N < 1:
                raise SpecError(f"ensemble size must be >= 1, got {N}")
            if len(set(record_positions)) != len(record_positions) or any(
                not 0 <= p < T for p in record_positions
            ):
                raise SpecError(f"record positions {list(record_positions)} must be distinct and in [0, {T})")
            free = T - len(record_positions)
            if N > 3**free:
                raise SpecError(
                    f"only 3**{free} = {3**free} environment states have a blank record register; N={N} requested"
                )
            blank = 3 ** len(record_positions) - 1
            ensemble = [e for e in range(3**T) if read_register(e, T, record_positions) == blank][:N]
        return cls(M, T, tuple(record_positions), InitialEnsemble(frozenset(ensemble)), target)


def canonical_erasure_map(spec: ErasureSpec) -> ReversibleMap:
    """The record-register erasure: (s, e) -> (target, e with register := s).

    Outside {all s} x ensemble the map is completed deterministically: the
    remaining inputs in ascending flat order take the unused outputs in
    ascending flat order.
    """
    space = spec.space
    constrained = {}
    for js in spec.constrained_domain():
        out = JointState(spec.target, set_register(js.env, spec.T, spec.record_positions, js.system))
        constrained[space.flatten(js)] = space.flatten(out)
    return complete_assignment(constrained, spec.M, spec.T)


def complete_assignment(constrained: dict[int, int], M: int, T: int) -> ReversibleMap:
    """Extend an injective partial map on flat indices to a full bijection."""
    n = JointSpace(M, T).size
    if len(set(constrained.values())) != len(constrained):
        raise InvertibilityError("partial assignment is not injective")
    used = set(constrained.values())
    free_out = iter(j for j in range(n) if j not in used)
    image = [constrained[i] if i in constrained else next(free_out) for i in range(n)]
    return validate_bijection(image, M, T)


class ErasureCheck(NamedTuple):
    holds: bool
    witness: JointState | None


def erasure_condition_holds(f: ReversibleMap, spec: ErasureSpec) -> ErasureCheck:
    for js in spec.constrained_domain():
        if f.apply(js).system != spec.target:
            return ErasureCheck(False, js)
    return ErasureCheck(True, None)


class ImageSets(NamedTuple):
    per_state: tuple[frozenset[int], ...]
    union: frozenset[int]


def image_env_sets(f: ReversibleMap, spec: ErasureSpec) -> ImageSets:
    """Environment images of each branch {s} x ensemble, and their union."""
    check = erasure_condition_holds(f, spec)
    if not check.holds:
        raise ContractError(f"map does not erase: {check.witness} keeps system != {spec.target}")
    members = spec.ensemble.sorted()
    per_state = tuple(
        frozenset(f.apply(JointState(s, e)).env for e in members) for s in range(spec.M)
    )
    return ImageSets(per_state, frozenset().union(*per_state))


# -- map files ----------------------------------------------------------------


def format_map(f: ReversibleMap) -> str:
    lines = [f"revmap {f.M} {f.T}"]
    lines.extend(f"{i} -> {j}" for i, j in enumerate(f.image))
    return "\n".join(lines) + "\n"


def parse_map(text: str) -> ReversibleMap:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MapFormatError("empty map file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "revmap":
        raise MapFormatError(f"bad header {lines[0]!r}; expected 'revmap M T'")
    try:
        M, T = int(head[1]), int(head[2])
        space = JointSpace(M, T)
    except (ValueError, DomainError) as exc:
        raise MapFormatError(f"bad header {lines[0]!r}: {exc}") from None
    body = lines[1:]
    if len(body) != space.size:
        raise MapFormatError(f"expected {space.size} mapping lines, got {len(body)}")
    image = []
    for k, line in enumerate(body):
        lhs, arrow, rhs = line.partition("->")
        try:
            i, j = int(lhs), int(rhs)
        except ValueError:
            raise MapFormatError(f"line {k + 2}: expected 'i -> j', got {line!r}") from None
        if not arrow or i != k:
            raise MapFormatError(f"line {k + 2}: expected input {k} in ascending order, got {line!r}")
        image.append(j)
    try:
        return validate_bijection(image, M, T)
    except InvertibilityError as exc:
        raise MapFormatError(str(exc)) from None


def load_map(path: str | os.PathLike) -> ReversibleMap:
    with open(path) as fh:
        return parse_map(fh.read())


def save_map(f: ReversibleMap, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_map(f))
