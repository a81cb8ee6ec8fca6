"""Exact probabilistic bisimulation.

The coarsest bisimulation partition is computed by naive signature
refinement: starting from a single block, states are repeatedly split by
the vector of (per-action enabledness, per-action mass into each current
block) until stable.  Two systems are compared by refining their disjoint
union and asking whether every resulting class contains states of both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Classification,
    DEFAULT_TOL,
    LabelledPTS,
    Partition,
    disjoint_union,
    partition_to_classification,
)
from .errors import NotLumpableError
from .matrices import classification_matrix, is_lumpable, lump


@dataclass(frozen=True)
class BisimWitness:
    """Certificate that two systems are bisimilar.

    ``k1`` and ``k2`` classify each system into the same ``m`` classes;
    lumping either system through its classification yields the same
    quotient family, reported here as ``quotient``.
    """

    m: int
    k1: Classification
    k2: Classification
    quotient: LabelledPTS


def coarsest_bisimulation(pts: LabelledPTS, tol: float = DEFAULT_TOL) -> Partition:
    """Coarsest partition whose classes are probabilistically bisimilar.

    Equivalently, the coarsest strongly lumpable partition: within a class
    all states enable the same actions and place equal mass (within
    ``tol``) into every class.  Grouping by tolerance is done leader-first
    after sorting signatures, which is deterministic; note that tolerance
    grouping is not transitive, so probabilities close to the tolerance
    boundary should be avoided in inputs (generated corpora use exactly
    representable dyadic probabilities).
    """
    blocks: list[list[int]] = [list(range(pts.n))]
    while True:
        k = np.zeros((pts.n, len(blocks)))
        for j, b in enumerate(blocks):
            k[b, j] = 1.0
        sig_parts = []
        for a in pts.actions:
            m = pts.trans[a]
            enabled = (m.sum(axis=1) > 0.5).astype(float)
            sig_parts.append(enabled[:, None])
            sig_parts.append(m @ k)
        sig = np.hstack(sig_parts)

        new_blocks: list[list[int]] = []
        for b in blocks:
            ordered = sorted(b, key=lambda s: tuple(sig[s]))
            groups: list[list[int]] = []
            for s in ordered:
                if groups and np.all(np.abs(sig[s] - sig[groups[-1][0]]) <= tol):
                    groups[-1].append(s)
                else:
                    groups.append([s])
            new_blocks.extend(groups)
        if len(new_blocks) == len(blocks):
            return Partition(pts.n, tuple(frozenset(b) for b in new_blocks))
        blocks = new_blocks


def quotient(pts: LabelledPTS, c: Classification, tol: float = DEFAULT_TOL) -> LabelledPTS:
    """Lump a system through a classification that must be lumpable."""
    ok, violation = is_lumpable(pts, c, tol)
    if not ok:
        raise NotLumpableError(violation)
    k = classification_matrix(c)
    trans = {a: lump(pts.trans[a], k) for a in pts.actions}
    return LabelledPTS(c.m, pts.actions, trans)


def are_bisimilar(
    p1: LabelledPTS, p2: LabelledPTS, tol: float = DEFAULT_TOL
) -> tuple[bool, BisimWitness | None]:
    """Whole-system bisimilarity check with witness classifications.

    The two systems are bisimilar iff every class of the coarsest
    bisimulation of their disjoint union contains states from both sides.
    On success the union partition is split back into per-system
    classifications whose quotients coincide.
    """
    union, off = disjoint_union(p1, p2)
    part = coarsest_bisimulation(union, tol)
    for b in part.blocks:
        if min(b) >= off or max(b) < off:
            return False, None
    block_of = part.block_of()
    k1 = Classification(tuple(block_of[:off]), part.m)
    k2 = Classification(tuple(block_of[off:]), part.m)
    ku = classification_matrix(partition_to_classification(part))
    q = LabelledPTS(part.m, union.actions, {a: lump(union.trans[a], ku) for a in union.actions})
    return True, BisimWitness(part.m, k1, k2, q)
