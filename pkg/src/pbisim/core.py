"""Core domain types: labelled probabilistic transition systems, partitions
and classifications.

A system keeps one square matrix per action label.  Row ``s`` of
``trans[a]`` is the distribution of a-successors of state ``s``; a zero row
means the action is not enabled in that state (reactive-system convention:
a transition is either a full distribution or absent).  Every value here is
immutable after construction and every operation is a pure function, so
instances can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyActionSetError,
    NegativeEntryError,
    NonSurjectiveError,
    RowSumError,
    ValidationError,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LabelledPTS:
    """Finite reactive probabilistic transition system.

    Attributes:
        n: number of states, indexed ``0..n-1``.
        actions: ordered action alphabet.
        trans: matrix per action; ``trans[a][s, t]`` is the probability of
            moving from ``s`` to ``t`` on action ``a``.
    """

    n: int
    actions: tuple[str, ...]
    trans: Mapping[str, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        frozen = {}
        for a in self.actions:
            if a not in self.trans:
                raise ValidationError(f"no matrix for action {a!r}")
            m = np.array(self.trans[a], dtype=float)
            if m.shape != (self.n, self.n):
                raise ValidationError(
                    f"matrix for action {a!r} has shape {m.shape}, "
                    f"expected {(self.n, self.n)}"
                )
            m.setflags(write=False)
            frozen[a] = m
        if set(self.trans) != set(self.actions):
            raise ValidationError("trans has matrices for undeclared actions")
        object.__setattr__(self, "trans", frozen)

    def matrix(self, action: str) -> np.ndarray:
        return self.trans[action]

    def matrix_or_zero(self, action: str) -> np.ndarray:
        """Matrix for ``action``, or an all-zero matrix if the label is absent."""
        if action in self.trans:
            return self.trans[action]
        return np.zeros((self.n, self.n))

    def enabled(self, action: str) -> np.ndarray:
        """Boolean mask of states in which ``action`` is enabled."""
        return self.matrix_or_zero(action).sum(axis=1) > 0.5

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelledPTS):
            return NotImplemented
        return (
            self.n == other.n
            and self.actions == other.actions
            and all(np.array_equal(self.trans[a], other.trans[a]) for a in self.actions)
        )

    def __repr__(self) -> str:
        return f"LabelledPTS(n={self.n}, actions={list(self.actions)})"


@dataclass(frozen=True)
class Partition:
    """Partition of ``0..n-1`` into disjoint non-empty blocks.

    Blocks are stored in canonical order: sorted by their smallest member.
    """

    n: int
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(sorted((frozenset(b) for b in self.blocks), key=min))
        object.__setattr__(self, "blocks", blocks)
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise ValidationError("empty block")
            if seen & b:
                raise ValidationError("blocks overlap")
            seen |= b
        if seen != set(range(self.n)):
            raise ValidationError(f"blocks do not cover 0..{self.n - 1}")

    @property
    def m(self) -> int:
        return len(self.blocks)

    def block_of(self) -> list[int]:
        """Per-state block index, following canonical block order."""
        out = [0] * self.n
        for j, b in enumerate(self.blocks):
            for s in b:
                out[s] = j
        return out


@dataclass(frozen=True)
class Classification:
    """Surjective assignment of states to class indices ``0..m-1``."""

    assign: tuple[int, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, "assign", tuple(int(v) for v in self.assign))
        if self.m < 1:
            raise ValidationError(f"class count must be >= 1, got {self.m}")
        if not self.assign:
            raise ValidationError("empty assignment")
        hit = [False] * self.m
        for s, v in enumerate(self.assign):
            if not 0 <= v < self.m:
                raise ValidationError(f"state {s} assigned to class {v} outside 0..{self.m - 1}")
            hit[v] = True
        for j, h in enumerate(hit):
            if not h:
                raise NonSurjectiveError(j)

    @property
    def n(self) -> int:
        return len(self.assign)

    def relabeled(self, sigma: Sequence[int]) -> "Classification":
        """Apply the class permutation ``sigma`` (old index -> new index)."""
        return Classification(tuple(sigma[v] for v in self.assign), self.m)


def validate_pts(pts: LabelledPTS, tol: float = DEFAULT_TOL) -> None:
    """Check the reactive-system invariants; raise on the first violation.

    Every entry must be non-negative and every row must sum to 0 (action
    disabled) or 1 (full distribution) within ``tol``.
    """
    if pts.n < 1:
        raise ValidationError("state count must be >= 1")
    if not pts.actions:
        raise EmptyActionSetError()
    for a in pts.actions:
        m = pts.trans[a]
        if not np.all(np.isfinite(m)):
            raise ValidationError(f"non-finite entry in action {a!r}")
        for s in range(pts.n):
            row = m[s]
            bad = np.nonzero(row < -tol)[0]
            if bad.size:
                raise NegativeEntryError(s, a, float(row[bad[0]]))
            total = float(row.sum())
            if abs(total) > tol and abs(total - 1.0) > tol:
                raise RowSumError(s, a, total)


def partition_to_classification(p: Partition) -> Classification:
    return Classification(tuple(p.block_of()), p.m)


def classification_to_partition(c: Classification) -> Partition:
    members: list[set[int]] = [set() for _ in range(c.m)]
    for s, v in enumerate(c.assign):
        members[v].add(s)
    for j, b in enumerate(members):
        if not b:
            raise NonSurjectiveError(j)
    return Partition(c.n, tuple(frozenset(b) for b in members))


def disjoint_union(p1: LabelledPTS, p2: LabelledPTS) -> tuple[LabelledPTS, int]:
    """Block-diagonal union of two systems.

    The union alphabet keeps ``p1``'s action order and appends labels only
    found in ``p2``.  States of ``p2`` are shifted by ``p1.n``, which is
    returned as the offset.  Actions missing from one side contribute zero
    rows for that side's states.
    """
    actions = list(p1.actions) + [a for a in p2.actions if a not in p1.actions]
    n = p1.n + p2.n
    trans = {}
    for a in actions:
        m = np.zeros((n, n))
        if a in p1.trans:
            m[: p1.n, : p1.n] = p1.trans[a]
        if a in p2.trans:
            m[p1.n :, p1.n :] = p2.trans[a]
        trans[a] = m
    return LabelledPTS(n, tuple(actions), trans), p1.n
