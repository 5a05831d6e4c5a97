"""Finite microstate spaces: a system of M states coupled to a trit-register environment.

Environment microstates are strings of T trits, read as radix-3 numbers with
trit 0 as the most significant digit. A joint microstate (s, e) is flattened
to ``s * 3**T + e``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence


class EncodingError(ValueError):
    """A trit string contains a digit outside {0, 1, 2}."""


class DomainError(ValueError):
    """An index lies outside the state space it is supposed to address."""


class PartitionError(ValueError):
    """Macrostate classes overlap, leave gaps, or are empty."""


def env_size(T: int) -> int:
    if T < 0:
        raise DomainError(f"trit count must be non-negative, got {T}")
    return 3**T


@dataclass(frozen=True)
class SystemState:
    value: int
    dim: int = 2

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError(f"system dimension must be >= 1, got {self.dim}")
        if not 0 <= self.value < self.dim:
            raise DomainError(f"system state {self.value} outside [0, {self.dim})")


@dataclass(frozen=True)
class TritString:
    trits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "trits", tuple(self.trits))
        bad = [(i, t) for i, t in enumerate(self.trits) if t not in (0, 1, 2)]
        if bad:
            raise EncodingError(f"non-trit digits at positions {bad}")

    def __len__(self) -> int:
        return len(self.trits)

    def __iter__(self):
        return iter(self.trits)


def encode_trits(trits: TritString | Sequence[int]) -> int:
    """Radix-3 value of a trit string, most significant trit first."""
    digits = trits.trits if isinstance(trits, TritString) else TritString(tuple(trits)).trits
    index = 0
    for t in digits:
        index = 3 * index + t
    return index


def decode_trits(index: int, T: int) -> TritString:
    if not 0 <= index < env_size(T):
        raise DomainError(f"environment index {index} outside [0, 3**{T})")
    digits = [0] * T
    for pos in range(T - 1, -1, -1):
        index, digits[pos] = divmod(index, 3)
    return TritString(tuple(digits))


@dataclass(frozen=True, order=True)
class JointState:
    system: int
    env: int

    def flat(self, T: int) -> int:
        return self.system * env_size(T) + self.env


@dataclass(frozen=True)
class JointSpace:
    """Index bookkeeping for the M x 3**T joint space."""

    M: int
    T: int

    def __post_init__(self):
        if self.M < 1:
            raise DomainError(f"system dimension must be >= 1, got {self.M}")
        env_size(self.T)

    @property
    def n_env(self) -> int:
        return 3**self.T

    @property
    def size(self) -> int:
        return self.M * self.n_env

    def flatten(self, state: JointState) -> int:
        if not (0 <= state.system < self.M and 0 <= state.env < self.n_env):
            raise DomainError(f"{state} outside joint space M={self.M}, T={self.T}")
        return state.flat(self.T)

    def unflatten(self, index: int) -> JointState:
        if not 0 <= index < self.size:
            raise DomainError(f"flat index {index} outside [0, {self.size})")
        s, e = divmod(index, self.n_env)
        return JointState(s, e)


@dataclass(frozen=True)
class MacroPartition:
    """Environment microstates grouped into labelled macrostate classes."""

    T: int
    classes: tuple[frozenset[int], ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.classes):
            raise PartitionError("one label per class required")
        if len(set(self.labels)) != len(self.labels):
            raise PartitionError(f"duplicate class labels in {self.labels}")
        # Built once; membership lookups are O(1) afterwards.
        lookup = {}
        for label, cls in zip(self.labels, self.classes):
            for e in cls:
                lookup[e] = label
        object.__setattr__(self, "_lookup", lookup)

    def __len__(self) -> int:
        return len(self.classes)

    def class_of(self, label: int) -> frozenset[int]:
        return self.classes[self.labels.index(label)]


def make_partition(
    classes: Iterable[Iterable[int]], T: int, labels: Sequence[int] | None = None
) -> MacroPartition:
    """Validate a candidate partition of the 3**T environment states.

    Raises PartitionError naming the offending states when classes overlap,
    a state is missing, a state is out of range, or a class is empty.
    """
    n = env_size(T)
    classes = [frozenset(c) for c in classes]
    labels = tuple(range(len(classes))) if labels is None else tuple(labels)
    if len(labels) != len(classes):
        raise PartitionError(f"{len(labels)} labels for {len(classes)} classes")

    empty = [labels[i] for i, c in enumerate(classes) if not c]
    if empty:
        raise PartitionError(f"empty macrostate class(es): {empty}")

    seen: dict[int, int] = {}
    overlaps = set()
    out_of_range = set()
    for i, cls in enumerate(classes):
        for e in cls:
            if not 0 <= e < n:
                out_of_range.add(e)
            if e in seen:
                overlaps.add(e)
            seen[e] = i
    if out_of_range:
        raise PartitionError(f"states outside [0, {n}): {sorted(out_of_range)}")
    if overlaps:
        raise PartitionError(f"states in more than one class: {sorted(overlaps)}")
    gaps = sorted(set(range(n)) - seen.keys())
    if gaps:
        raise PartitionError(f"states in no class: {gaps}")
    return MacroPartition(T=T, classes=tuple(classes), labels=labels)


def macrostate_of(partition: MacroPartition, e: int) -> int:
    if not 0 <= e < env_size(partition.T):
        raise DomainError(f"environment index {e} outside [0, 3**{partition.T})")
    return partition._lookup[e]


@dataclass(frozen=True)
class InitialEnsemble:
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise DomainError("initial ensemble must contain at least one state")

    @property
    def N(self) -> int:
        return len(self.members)

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def check_against(self, partition: MacroPartition) -> None:
        """Require the ensemble to be exactly one class of ``partition``."""
        if self.members not in partition.classes:
            raise PartitionError(
                f"ensemble {self.sorted()} is not a macrostate class of the partition"
            )


def ensemble_partition(ensemble: InitialEnsemble, T: int, extra: Iterable[int] = ()) -> MacroPartition:
    """Coarsest partition with the ensemble as one class.

    ``extra`` optionally carves a further class out of the complement (used to
    host the post-erasure image set).
    """
    rest = set(range(env_size(T))) - ensemble.members
    extra = frozenset(extra)
    classes = [ensemble.members]
    if extra:
        classes.append(extra)
        rest -= extra
    if rest:
        classes.append(frozenset(rest))
    return make_partition(classes, T)


# -- partition files ----------------------------------------------------------


def parse_partition(text: str, T: int) -> MacroPartition:
    """Parse ``label: i1,i2,...`` lines; ``#`` starts a comment line."""
    labels, classes = [], []
    where: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise PartitionError(f"line {lineno}: expected 'label: i1,i2,...'")
        try:
            label = int(head.strip())
            members = [int(tok) for tok in body.split(",") if tok.strip()]
        except ValueError as exc:
            raise PartitionError(f"line {lineno}: {exc}") from None
        for e in members:
            if e in where:
                raise PartitionError(
                    f"line {lineno}: state {e} already listed on line {where[e]}"
                )
            where[e] = lineno
        labels.append(label)
        classes.append(members)
    return make_partition(classes, T, labels)


def format_partition(partition: MacroPartition) -> str:
    lines = [f"# macrostate partition, T={partition.T}"]
    for label, cls in zip(partition.labels, partition.classes):
        lines.append(f"{label}: " + ",".join(str(e) for e in sorted(cls)))
    return "\n".join(lines) + "\n"


def load_partition(path: str | os.PathLike, T: int) -> MacroPartition:
    with open(path) as fh:
        return parse_partition(fh.read(), T)


def save_partition(partition: MacroPartition, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_partition(partition))
