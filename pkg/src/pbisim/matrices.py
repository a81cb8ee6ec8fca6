"""Classification matrices, their pseudo-inverses, lumping and norms.

A classification matrix K is the n x m 0/1 matrix of a surjective
state-to-class assignment: exactly one 1 per row, no zero column.  For such
K the Moore-Penrose pseudo-inverse has a closed form, the row-normalised
transpose, so no numerical factorisation is ever needed here.  Lumping a
square matrix M through K gives the m x m matrix K+ M K whose (i, j) entry
is the average, over the states of class i, of their total mass into class
j (Kemeny-Snell style strong lumping).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Classification, LabelledPTS, DEFAULT_TOL
from .errors import DimensionMismatchError, NotClassificationMatrixError

NORM_KINDS = ("op-inf", "entry-max", "frobenius")


def classification_matrix(c: Classification, n: int | None = None) -> np.ndarray:
    """0/1 matrix of a classification: K[s, j] = 1 iff state s is in class j."""
    if n is None:
        n = c.n
    elif n != c.n:
        raise DimensionMismatchError(
            f"classification covers {c.n} states, expected {n}"
        )
    k = np.zeros((n, c.m))
    k[np.arange(n), list(c.assign)] = 1.0
    return k


def _check_classification_matrix(k: np.ndarray) -> None:
    if k.ndim != 2:
        raise NotClassificationMatrixError(f"expected a matrix, got ndim={k.ndim}")
    if not np.all((k == 0.0) | (k == 1.0)):
        raise NotClassificationMatrixError("entries must be exactly 0 or 1")
    if not np.all(k.sum(axis=1) == 1.0):
        raise NotClassificationMatrixError("each row must contain exactly one 1")
    if np.any(k.sum(axis=0) == 0.0):
        raise NotClassificationMatrixError("every column must be inhabited")


def pseudo_inverse(k: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a classification matrix.

    Closed form: transpose K and divide each row by its sum (the class
    size).  The result satisfies all four Penrose identities exactly up to
    the division rounding.
    """
    k = np.asarray(k, dtype=float)
    _check_classification_matrix(k)
    return k.T / k.sum(axis=0)[:, None]


def penrose_check(k: np.ndarray, p: np.ndarray, tol: float = 1e-12) -> bool:
    """Entrywise check of the four Penrose identities.

    KPK = K, PKP = P, (KP)^T = KP and (PK)^T = PK, each within ``tol``.
    """
    k = np.asarray(k, dtype=float)
    p = np.asarray(p, dtype=float)
    if k.ndim != 2 or p.ndim != 2 or k.shape != p.shape[::-1]:
        raise DimensionMismatchError(
            f"incompatible shapes {k.shape} and {p.shape}"
        )
    kp = k @ p
    pk = p @ k
    return (
        np.allclose(kp @ k, k, rtol=0.0, atol=tol)
        and np.allclose(pk @ p, p, rtol=0.0, atol=tol)
        and np.allclose(kp.T, kp, rtol=0.0, atol=tol)
        and np.allclose(pk.T, pk, rtol=0.0, atol=tol)
    )


def lump(m: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Quotient transform K+ M K for a classification matrix K.

    Evaluated as block sums followed by a single division per class, so
    that exactly representable inputs stay exact (dividing each addend
    first would round before the cancellation).
    """
    m = np.asarray(m, dtype=float)
    k = np.asarray(k, dtype=float)
    _check_classification_matrix(k)
    if m.shape != (k.shape[0], k.shape[0]):
        raise DimensionMismatchError(
            f"matrix shape {m.shape} does not match {k.shape[0]} states"
        )
    return (k.T @ (m @ k)) / k.sum(axis=0)[:, None]


@dataclass(frozen=True)
class LumpabilityViolation:
    """First witness that two same-class states behave differently."""

    action: str
    state_a: int
    state_b: int
    target_block: int | None  # None when enabledness itself differs
    reason: str

    def __str__(self) -> str:
        where = (
            f"masses into block {self.target_block} differ"
            if self.target_block is not None
            else "enabledness differs"
        )
        return (
            f"action {self.action!r}: states {self.state_a} and {self.state_b} "
            f"share a class but {where} ({self.reason})"
        )


def is_lumpable(
    pts: LabelledPTS, c: Classification, tol: float = DEFAULT_TOL
) -> tuple[bool, LumpabilityViolation | None]:
    """Strong lumpability of a classification, with equal enabledness.

    True iff for every action, all states of a class agree on whether the
    action is enabled and, when enabled, place equal total mass (within
    ``tol``) into every class.  Returns the first violation in action /
    block / state order, or ``None``.
    """
    if c.n != pts.n:
        raise DimensionMismatchError(
            f"classification covers {c.n} states, system has {pts.n}"
        )
    k = classification_matrix(c)
    blocks = [sorted(b) for b in _blocks_of(c)]
    for a in pts.actions:
        m = pts.trans[a]
        masses = m @ k  # per-state mass into each class
        on = m.sum(axis=1) > 0.5
        for block in blocks:
            lead = block[0]
            for s in block[1:]:
                if on[s] != on[lead]:
                    return False, LumpabilityViolation(
                        a, lead, s, None,
                        f"enabled({lead})={bool(on[lead])}, enabled({s})={bool(on[s])}",
                    )
                diff = np.abs(masses[s] - masses[lead])
                bad = np.nonzero(diff > tol)[0]
                if bad.size:
                    j = int(bad[0])
                    return False, LumpabilityViolation(
                        a, lead, s, j,
                        f"{masses[lead][j]!r} vs {masses[s][j]!r}",
                    )
    return True, None


def _blocks_of(c: Classification) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(c.m)]
    for s, v in enumerate(c.assign):
        out[v].append(s)
    return out


def matrix_norm(m: np.ndarray, kind: str = "op-inf") -> float:
    """Matrix norm used to compare lumped systems.

    op-inf: operator norm induced by the max vector norm, i.e. the largest
    absolute row sum.  entry-max: largest absolute entry.  frobenius:
    square root of the sum of squared entries.
    """
    m = np.asarray(m, dtype=float)
    if kind == "op-inf":
        return float(np.abs(m).sum(axis=1).max())
    if kind == "entry-max":
        return float(np.abs(m).max())
    if kind == "frobenius":
        return float(math.sqrt(float((m * m).sum())))
    raise ValueError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")
