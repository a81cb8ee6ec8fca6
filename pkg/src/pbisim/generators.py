"""Seeded generators for test corpora.

All randomness is drawn from ``random.Random(seed)`` in a fixed order, so
every generator is reproducible.  Probabilities are dyadic rationals
(denominator 1024 for fresh rows, 2**20 after lifting or perturbing),
which keeps row sums exactly representable in binary floating point and
makes tolerance-based refinement robust in tests.
"""

from __future__ import annotations

import math
import random
from typing import Sequence

import numpy as np

from .core import Classification, LabelledPTS
from .errors import ValidationError

_DENOM = 1 << 10
_PERTURB_GRID = 1 << 20


def _dyadic_weights(rng: random.Random, parts: int) -> list[int]:
    """Integers summing to the dyadic denominator, one per part."""
    if parts == 1:
        return [_DENOM]
    cuts = sorted(rng.randrange(_DENOM + 1) for _ in range(parts - 1))
    bounds = [0] + cuts + [_DENOM]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def gen_random_pts(
    n: int, actions: Sequence[str], density: float, seed: int
) -> LabelledPTS:
    """Random reactive system with dyadic transition probabilities.

    Each (state, action) pair is enabled independently with probability
    ``density``; enabled rows are random distributions with denominator
    1024, so they sum to exactly 1.0.
    """
    if n < 1:
        raise ValidationError("need n >= 1")
    if not 0.0 < density <= 1.0:
        raise ValidationError("density must be in (0, 1]")
    rng = random.Random(seed)
    trans = {}
    for a in actions:
        m = np.zeros((n, n))
        for s in range(n):
            if rng.random() < density:
                m[s] = np.array(_dyadic_weights(rng, n)) / _DENOM
        trans[a] = m
    return LabelledPTS(n, tuple(actions), trans)


def gen_planted(
    quotient: LabelledPTS, multiplicities: Sequence[int], seed: int
) -> tuple[LabelledPTS, Classification]:
    """Lift a quotient to a larger system with a known lumpable classification.

    Quotient state j becomes ``multiplicities[j]`` lifted states.  Every
    lifted state reproduces its quotient row at block granularity: the mass
    it sends into a target block equals the quotient entry exactly, split
    across the block's members by seeded dyadic weights.  Lumping the
    result through the returned classification recovers the quotient.
    """
    if len(multiplicities) != quotient.n:
        raise ValidationError(
            f"{len(multiplicities)} multiplicities for {quotient.n} quotient states"
        )
    if any(k < 1 for k in multiplicities):
        raise ValidationError("multiplicities must be >= 1")
    rng = random.Random(seed)
    offsets = [0]
    for k in multiplicities:
        offsets.append(offsets[-1] + k)
    n = offsets[-1]
    assign = tuple(j for j in range(quotient.n) for _ in range(multiplicities[j]))

    trans = {}
    for a in quotient.actions:
        q = quotient.trans[a]
        m = np.zeros((n, n))
        for u in range(n):
            j = assign[u]
            if q[j].sum() <= 0.5:
                continue
            for t in range(quotient.n):
                if q[j, t] == 0.0:
                    continue
                weights = _dyadic_weights(rng, multiplicities[t])
                for k, w in enumerate(weights):
                    m[u, offsets[t] + k] = q[j, t] * (w / _DENOM)
        trans[a] = m
    lift = LabelledPTS(n, quotient.actions, trans)
    return lift, Classification(assign, quotient.n)


def perturb(pts: LabelledPTS, delta: float, seed: int) -> LabelledPTS:
    """Move at most ``delta`` mass inside every enabled row.

    Each enabled row donates ``min(delta, donor mass)`` from one random
    positive entry to another random entry, quantised to a grid of 2**-20
    so that dyadic rows stay exactly stochastic.  ``delta`` = 0 (or a
    single-state system) returns the input unchanged.
    """
    if delta < 0:
        raise ValidationError("delta must be >= 0")
    rng = random.Random(seed)
    trans = {}
    for a in pts.actions:
        m = pts.trans[a].copy()
        for s in range(pts.n):
            row = m[s]
            if row.sum() <= 0.5 or pts.n < 2:
                continue
            positive = [t for t in range(pts.n) if row[t] > 0.0]
            donor = positive[rng.randrange(len(positive))]
            recip = rng.randrange(pts.n - 1)
            if recip >= donor:
                recip += 1
            t_amount = min(delta, float(row[donor]))
            t_amount = math.floor(t_amount * _PERTURB_GRID) / _PERTURB_GRID
            if t_amount > 0.0:
                row[donor] -= t_amount
                row[recip] += t_amount
        trans[a] = m
    return LabelledPTS(pts.n, pts.actions, trans)
