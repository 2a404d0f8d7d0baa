"""Commuting local Hamiltonians and stoquastic projector instances.

Matrices are numpy object arrays of :class:`~tnz.core.Scalar`.  A term on
support ``(q1, ..., qk)`` is indexed row-major with ``q1`` most significant.
Qudits are numbered from 0.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import ONE, ZERO, Scalar, as_scalar
from .errors import (
    GuessRejected,
    MalformedGuess,
    MalformedTerm,
    NotCommuting,
    NotStoquastic,
    TooLarge,
)

DEFAULT_MAX_QUDITS = 12


def scalar_matrix(rows) -> np.ndarray:
    """Object array of Scalars from nested rows of numbers, strings or Scalars."""
    rows = [[as_scalar(v) if not isinstance(v, str) else Scalar.parse(v) for v in r] for r in rows]
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, r in enumerate(rows):
        if len(r) != out.shape[1]:
            raise MalformedTerm("ragged matrix")
        for j, v in enumerate(r):
            out[i, j] = v
    return out


def identity(dim: int) -> np.ndarray:
    out = np.full((dim, dim), ZERO, dtype=object)
    for i in range(dim):
        out[i, i] = ONE
    return out


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(M).T


def is_hermitian(M: np.ndarray) -> bool:
    return M.shape[0] == M.shape[1] and bool((M == dagger(M)).all())


def is_projector(M: np.ndarray) -> bool:
    return is_hermitian(M) and bool((M @ M == M).all())


def is_zero(M: np.ndarray) -> bool:
    return not any(bool(v) for v in M.flat)


@dataclass(frozen=True)
class LocalTerm:
    support: tuple
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(q) for q in self.support))
        m = self.matrix
        if not isinstance(m, np.ndarray) or m.dtype != object:
            m = scalar_matrix(m)
        object.__setattr__(self, "matrix", m)

    @property
    def k(self) -> int:
        return len(self.support)


@dataclass(frozen=True)
class HamiltonianInstance:
    n: int
    D: int
    terms: tuple
    alpha: Scalar = Scalar(0)
    beta: Scalar = Scalar(0)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "alpha", as_scalar(self.alpha))
        object.__setattr__(self, "beta", as_scalar(self.beta))
        if self.n < 1 or self.D < 1:
            raise MalformedTerm("need n >= 1 and D >= 1")
        if not (self.alpha.is_real() and self.beta.is_real()):
            raise MalformedTerm("thresholds must be real")
        for i, t in enumerate(self.terms):
            if len(set(t.support)) != t.k or not t.support:
                raise MalformedTerm(f"term {i}: support {t.support} must be non-empty and distinct")
            if any(not 0 <= q < self.n for q in t.support):
                raise MalformedTerm(f"term {i}: support {t.support} outside 0..{self.n - 1}")
            dim = self.D ** t.k
            if t.matrix.shape != (dim, dim):
                raise MalformedTerm(f"term {i}: matrix shape {t.matrix.shape}, expected {(dim, dim)}")
            if not is_hermitian(t.matrix):
                raise MalformedTerm(f"term {i} is not Hermitian")


@dataclass(frozen=True)
class ProjectorGuess:
    term: int
    matrix: np.ndarray = field(compare=False)
    eigenvalue: Scalar = ONE

    def __post_init__(self):
        m = self.matrix
        if not isinstance(m, np.ndarray) or m.dtype != object:
            m = scalar_matrix(m)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eigenvalue", as_scalar(self.eigenvalue))


def embed(M: np.ndarray, support, target, D: int) -> np.ndarray:
    """Extend ``M`` on ``support`` to the qudits ``target`` by identity elsewhere."""
    support, target = list(support), list(target)
    pos = [target.index(q) for q in support]
    rest = [i for i in range(len(target)) if i not in pos]
    dim = D ** len(target)
    out = np.full((dim, dim), ZERO, dtype=object)
    basis = list(itertools.product(range(D), repeat=len(target)))
    sub = {}
    for r, row in enumerate(basis):
        sub[r] = (_flat([row[p] for p in pos], D), tuple(row[i] for i in rest))
    for r in range(dim):
        mr, rr = sub[r]
        for c in range(dim):
            mc, rc = sub[c]
            if rr == rc:
                out[r, c] = M[mr, mc]
    return out


def _flat(idx, D):
    out = 0
    for i in idx:
        out = out * D + i
    return out


def validate_commuting(H: HamiltonianInstance) -> bool:
    """True iff all terms pairwise commute, checked on each pair's joint support."""
    for i, j in itertools.combinations(range(len(H.terms)), 2):
        a, b = H.terms[i], H.terms[j]
        if not set(a.support) & set(b.support):
            continue
        joint = sorted(set(a.support) | set(b.support))
        A = embed(a.matrix, a.support, joint, H.D)
        B = embed(b.matrix, b.support, joint, H.D)
        if not is_zero(A @ B - B @ A):
            return False
    return True


def verify_projector_guess(H: HamiltonianInstance, g: ProjectorGuess) -> bool:
    """Exact check that ``g`` projects onto an eigenspace of its term."""
    if not 0 <= g.term < len(H.terms):
        raise MalformedGuess(f"no term {g.term}")
    Hi = H.terms[g.term].matrix
    P = g.matrix
    if P.shape != Hi.shape:
        raise MalformedGuess(f"guess shape {P.shape} does not match term shape {Hi.shape}")
    if not g.eigenvalue.is_real():
        return False
    return is_projector(P) and bool((Hi @ P == P * g.eigenvalue).all())


def is_stoquastic_sat(H: HamiltonianInstance) -> bool:
    """Every term is an orthogonal projector with non-negative real entries."""
    for t in H.terms:
        if any(not v.is_real() or v.re < 0 for v in t.matrix.flat):
            return False
        if not is_projector(t.matrix):
            return False
    return True


def default_guesses(H: HamiltonianInstance) -> list:
    """Satisfied subspace of each projector term: the term itself, eigenvalue 1."""
    return [ProjectorGuess(i, t.matrix, ONE) for i, t in enumerate(H.terms)]


def ground_space_projector_bruteforce(H: HamiltonianInstance, guesses,
                                      max_qudits: int = DEFAULT_MAX_QUDITS) -> np.ndarray:
    """Dense product of the embedded guessed projectors, ascending term order."""
    if H.n > max_qudits:
        raise TooLarge(f"{H.n} qudits exceed the dense cap {max_qudits}")
    everything = list(range(H.n))
    out = identity(H.D ** H.n)
    for g in sorted(guesses, key=lambda g: g.term):
        out = out @ embed(g.matrix, H.terms[g.term].support, everything, H.D)
    return out


@dataclass
class StoqResult:
    satisfiable: bool
    x: tuple = None
    witness: object = None
    network: object = None


def solve_stoquastic_sat(H: HamiltonianInstance, guesses=None, x=None,
                         budget: int = 4096) -> StoqResult:
    """Decide commuting stoquastic k-SAT with a non-negative labeling certificate.

    For each basis string (the given ``x`` or all strings in lexicographic
    order, at most ``budget`` of them) the network for ``D^n Pi_H |x>`` is
    built and searched for a positive labeling.
    """
    from .certify import search_nonneg_witness
    from .reduce import compile_clh

    if not is_stoquastic_sat(H):
        raise NotStoquastic("terms must be projectors with non-negative real entries")
    if not validate_commuting(H):
        raise NotCommuting("terms do not pairwise commute")
    explicit = guesses is not None
    guesses = default_guesses(H) if guesses is None else list(guesses)
    for g in guesses:
        if not verify_projector_guess(H, g):
            raise GuessRejected(f"guess for term {g.term} rejected")
    if x is not None:
        candidates = [tuple(x)]
    else:
        candidates = itertools.islice(itertools.product(range(H.D), repeat=H.n), budget)
    for cand in candidates:
        T = compile_clh(H, guesses, cand, check_threshold=explicit)
        w = search_nonneg_witness(T)
        if w is not None:
            return StoqResult(True, tuple(cand), w, T)
    return StoqResult(False)
