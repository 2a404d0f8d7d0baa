"""Exact Gaussian-rational scalars and the tensor-network data model.

Indices are 0-based throughout the library: a slot of dimension ``d``
takes values ``0..d-1``.  The file formats in :mod:`tnz.io` are 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from .errors import (
    DimensionMismatch,
    DuplicateNode,
    IndexOutOfRange,
    SlotReuse,
    UnknownNode,
)


def _rational(value):
    """Exact rational as stored inside a Scalar: ``int`` when integral, else ``Fraction``."""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        value = Fraction(value.strip())
    elif isinstance(value, Rational):
        value = Fraction(value)
    else:
        raise TypeError(f"not an exact rational: {value!r}")
    return value.numerator if value.denominator == 1 else value


def _norm(q):
    # ints stay ints; Fractions collapse to int when integral (much faster arithmetic)
    if type(q) is int or q.denominator != 1:
        return q
    return q.numerator


class Scalar:
    """Complex number with arbitrary-precision rational parts.

    Instances are immutable.  Arithmetic mixes freely with ``int`` and
    ``Fraction``; floats are rejected.
    """

    __slots__ = ("_re", "_im")

    def __init__(self, re=0, im=0):
        if isinstance(re, Scalar):
            if im:
                raise TypeError("cannot combine a Scalar real part with an imaginary part")
            object.__setattr__(self, "_re", re._re)
            object.__setattr__(self, "_im", re._im)
            return
        object.__setattr__(self, "_re", _rational(re))
        object.__setattr__(self, "_im", _rational(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def _make(cls, re, im) -> "Scalar":
        s = object.__new__(cls)
        object.__setattr__(s, "_re", _norm(re))
        object.__setattr__(s, "_im", _norm(im))
        return s

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Parse ``"p/q"``, ``"r/s i"``, ``"p/q + r/s i"`` or ``"p/q - r/s i"``."""
        t = text.strip().replace(" ", "")
        if not t:
            raise ValueError("empty scalar")
        if not t.endswith("i"):
            return cls(Fraction(t))
        body = t[:-1]
        # split at the last sign that is not the leading one
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut <= 0:
            im = body if body not in ("", "+", "-") else body + "1"
            return cls(0, Fraction(im))
        re, im = body[:cut], body[cut:]
        if im in ("+", "-"):
            im += "1"
        return cls(Fraction(re), Fraction(im))

    @property
    def re(self) -> Fraction:
        return Fraction(self._re)

    @property
    def im(self) -> Fraction:
        return Fraction(self._im)

    def is_real(self) -> bool:
        return self._im == 0

    def conjugate(self) -> "Scalar":
        return Scalar._make(self._re, -self._im)

    def abs2(self) -> Fraction:
        """Squared modulus, exact."""
        return Fraction(self._re * self._re + self._im * self._im)

    def __bool__(self):
        return bool(self._re) or bool(self._im)

    def __neg__(self):
        return Scalar._make(-self._re, -self._im)

    def __pos__(self):
        return self

    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        return Scalar._make(self._re + other._re, self._im + other._im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        return Scalar._make(self._re - other._re, self._im - other._im)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self._re, self._im, other._re, other._im
        if not b and not d:
            return Scalar._make(a * c, b)
        return Scalar._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        n = self.abs2()
        if not n:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar._make(Fraction(self._re) / n, Fraction(-self._im) / n)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self._re == other._re and self._im == other._im
        if isinstance(other, (int, Fraction)):
            return self._im == 0 and self._re == other
        return NotImplemented

    def __hash__(self):
        if self._im == 0:
            return hash(self._re)
        return hash((self._re, self._im))

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    def __str__(self):
        re, im = self.re, self.im
        if im == 0:
            return str(re)
        if re == 0:
            return f"{im} i"
        sign = "+" if im > 0 else "-"
        return f"{re} {sign} {abs(im)} i"


ZERO = Scalar(0)
ONE = Scalar(1)


def as_scalar(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, complex):
        raise TypeError("complex floats are not exact")
    return Scalar(_rational(value))


@dataclass(frozen=True)
class TensorNode:
    """A tensor stored sparsely: absent multi-indices are exact zeros."""

    id: int
    dims: tuple
    entries: Mapping = field(default_factory=dict)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        entries = {}
        for idx, val in dict(self.entries).items():
            if isinstance(idx, int):
                idx = (idx,)
            val = as_scalar(val)
            if val:
                entries[tuple(int(i) for i in idx)] = val
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", entries)

    @property
    def rank(self) -> int:
        return len(self.dims)

    def check(self):
        for d in self.dims:
            if d < 1:
                raise DimensionMismatch(f"node {self.id}: slot dimension {d} < 1")
        for idx in self.entries:
            if not _in_range(idx, self.dims):
                raise IndexOutOfRange(f"node {self.id}: entry {idx} outside dims {self.dims}")


def _in_range(idx, dims) -> bool:
    return len(idx) == len(dims) and all(0 <= i < d for i, d in zip(idx, dims))


def node_entry(node: TensorNode, idx) -> Scalar:
    idx = (idx,) if isinstance(idx, int) else tuple(idx)
    if not _in_range(idx, node.dims):
        raise IndexOutOfRange(f"node {node.id}: index {idx} outside dims {node.dims}")
    return node.entries.get(idx, ZERO)


class TensorNetwork:
    """Nodes, virtual edges between ``(node_id, slot)`` pairs, and a global factor.

    An edge is identified by its position in :attr:`edges`.  Every slot not
    covered by an edge is a physical edge; these are ordered by
    ``(node_id, slot)``.
    """

    def __init__(self, nodes: Iterable[TensorNode], edges=(), global_scalar=1, *, check=True):
        self.nodes = tuple(nodes)
        self.edges = tuple(
            ((int(a), int(sa)), (int(b), int(sb))) for (a, sa), (b, sb) in edges
        )
        self.global_scalar = as_scalar(global_scalar)
        self._by_id = {}
        for n in self.nodes:
            self._by_id.setdefault(n.id, n)
        self._physical = None
        if check:
            validate_network(self)

    def node(self, node_id) -> TensorNode:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise UnknownNode(f"no node with id {node_id}") from None

    @property
    def node_ids(self):
        return sorted(self._by_id)

    @property
    def physical_edges(self) -> list:
        if self._physical is None:
            used = set()
            for a, b in self.edges:
                used.add(a)
                used.add(b)
            self._physical = sorted(
                (n.id, s) for n in self.nodes for s in range(n.rank) if (n.id, s) not in used
            )
        return list(self._physical)

    def slot_dim(self, slot) -> int:
        nid, s = slot
        return self.node(nid).dims[s]

    def bond_dim(self, e: int) -> int:
        return self.slot_dim(self.edges[e][0])

    def is_closed(self) -> bool:
        return not self.physical_edges

    def replace(self, nodes=None, edges=None, global_scalar=None, check=True) -> "TensorNetwork":
        return TensorNetwork(
            self.nodes if nodes is None else nodes,
            self.edges if edges is None else edges,
            self.global_scalar if global_scalar is None else global_scalar,
            check=check,
        )

    def __eq__(self, other):
        if not isinstance(other, TensorNetwork):
            return NotImplemented
        return (
            sorted(self.nodes, key=lambda n: n.id) == sorted(other.nodes, key=lambda n: n.id)
            and self.edges == other.edges
            and self.global_scalar == other.global_scalar
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"TensorNetwork({len(self.nodes)} nodes, {len(self.edges)} edges, "
            f"{len(self.physical_edges)} physical, scalar={self.global_scalar})"
        )


def validate_network(T: TensorNetwork) -> None:
    """Raise on the first violated structural invariant, else return None."""
    seen = set()
    for n in T.nodes:
        if n.id in seen:
            raise DuplicateNode(f"node id {n.id} used twice")
        seen.add(n.id)
        n.check()
    used = {}
    for e, (a, b) in enumerate(T.edges):
        if a == b:
            raise SlotReuse(f"edge {e} pairs slot {a} with itself")
        for end in (a, b):
            nid, s = end
            if nid not in seen:
                raise UnknownNode(f"edge {e} references missing node {nid}")
            if not 0 <= s < T.node(nid).rank:
                raise IndexOutOfRange(f"edge {e} references slot {s} of node {nid}")
            if end in used:
                raise SlotReuse(f"slot {end} used by edges {used[end]} and {e}")
            used[end] = e
        if T.slot_dim(a) != T.slot_dim(b):
            raise DimensionMismatch(
                f"edge {e}: dimensions {T.slot_dim(a)} and {T.slot_dim(b)} differ"
            )
