"""Exact contraction and evaluation of tensor networks."""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import ONE, ZERO, Scalar, TensorNetwork, TensorNode, as_scalar
from .errors import (
    IndexOutOfRange,
    LengthMismatch,
    NotClosed,
    NotTotal,
    TooLarge,
    UnknownEdge,
)

DEFAULT_ENUMERATION_CAP = 2**24


@dataclass(frozen=True)
class ContractionPlan:
    order: tuple
    max_intermediate: int


# -- sparse kernels ----------------------------------------------------------
# A working tensor is (labels, entries): labels[i] names slot i, entries maps
# index tuples to Scalars.  Virtual edges are labelled by their edge id, open
# slots by ("p", node_id, slot).


def _merge(la, ea, lb, eb, shared):
    pa = [la.index(s) for s in shared]
    pb = [lb.index(s) for s in shared]
    keep_a = [i for i in range(len(la)) if i not in pa]
    keep_b = [i for i in range(len(lb)) if i not in pb]
    groups = defaultdict(list)
    for idx, v in eb.items():
        groups[tuple(idx[p] for p in pb)].append((tuple(idx[i] for i in keep_b), v))
    out = {}
    for idx, v in ea.items():
        g = groups.get(tuple(idx[p] for p in pa))
        if not g:
            continue
        ra = tuple(idx[i] for i in keep_a)
        for rb, w in g:
            k = ra + rb
            prev = out.get(k)
            out[k] = v * w if prev is None else prev + v * w
    labels = [la[i] for i in keep_a] + [lb[i] for i in keep_b]
    return labels, {k: v for k, v in out.items() if v}


def _trace(labels, entries, label):
    i = labels.index(label)
    j = labels.index(label, i + 1)
    keep = [p for p in range(len(labels)) if p not in (i, j)]
    out = {}
    for idx, v in entries.items():
        if idx[i] != idx[j]:
            continue
        k = tuple(idx[p] for p in keep)
        out[k] = out[k] + v if k in out else v
    return [labels[p] for p in keep], {k: v for k, v in out.items() if v}


def _trace_self_loops(labels, entries, traced=None):
    """Trace every label occurring twice, in a single pass over the entries."""
    pairs = []
    for i, lab in enumerate(labels):
        j = labels.index(lab)
        if j != i:
            pairs.append((j, i))
    if not pairs:
        return labels, entries
    drop = {p for pair in pairs for p in pair}
    keep = [p for p in range(len(labels)) if p not in drop]
    out = {}
    for idx, v in entries.items():
        if all(idx[i] == idx[j] for i, j in pairs):
            k = tuple(idx[p] for p in keep)
            out[k] = out[k] + v if k in out else v
    if traced is not None:
        traced.update(labels[i] for i, _ in pairs)
    return [labels[p] for p in keep], {k: v for k, v in out.items() if v}


def _working_set(T: TensorNetwork):
    slot_label = {}
    for e, (a, b) in enumerate(T.edges):
        slot_label[a] = e
        slot_label[b] = e
    work = {}
    for n in T.nodes:
        labels = [slot_label.get((n.id, s), ("p", n.id, s)) for s in range(n.rank)]
        work[n.id] = (labels, dict(n.entries))
    return work


def _run(T: TensorNetwork, order: Sequence[int]):
    """Contract every virtual edge following ``order``; return leftover tensors.

    When two tensors are merged, every edge they share is summed at once.
    """
    work = _working_set(T)
    done = set()
    # node-local loops never grow a tensor, so they go first whatever the order
    for nid, (labels, entries) in work.items():
        work[nid] = _trace_self_loops(labels, entries, done)
    where = {}
    for nid, (labels, _) in work.items():
        for lab in labels:
            if not isinstance(lab, tuple):
                where.setdefault(lab, set()).add(nid)
    for e in order:
        if e in done:
            continue
        holders = where[e]
        if len(holders) == 1:
            (a,) = holders
            la, ea = work[a]
            work[a] = _trace(la, ea, e)
            done.add(e)
            continue
        a, b = sorted(holders)
        la, ea = _trace_self_loops(*work[a], done)
        lb, eb = _trace_self_loops(*work[b], done)
        shared = [lab for lab in la if lab in lb]
        labels, entries = _merge(la, ea, lb, eb, shared)
        done.update(shared)
        del work[b]
        work[a] = (labels, entries)
        for lab in labels:
            if not isinstance(lab, tuple):
                where[lab].discard(b)
                where[lab].add(a)
    return work


def _check_order(T: TensorNetwork, order):
    order = list(order)
    if sorted(order) != list(range(len(T.edges))):
        raise UnknownEdge("contraction order must list every edge id exactly once")
    return order


def contract_edge(T: TensorNetwork, e: int) -> TensorNetwork:
    """Contract a single virtual edge, merging its endpoints (or tracing a node).

    The merged node keeps the id of the edge's first endpoint; its slots are
    that node's remaining slots followed by the other node's remaining slots.
    """
    if not 0 <= e < len(T.edges):
        raise UnknownEdge(f"no edge {e}")
    (a, sa), (b, sb) = T.edges[e]
    A = T.node(a)
    if a == b:
        keep = [s for s in range(A.rank) if s not in (sa, sb)]
        labels = list(range(A.rank))
        labels[sb] = labels[sa] = "k"
        new_labels, entries = _trace(labels, dict(A.entries), "k")
        slot_map = {(a, s): (a, new_labels.index(s)) for s in keep}
        merged = TensorNode(a, tuple(A.dims[s] for s in keep), entries)
        others = {n.id for n in T.nodes if n.id != a}
    else:
        B = T.node(b)
        la = [("a", s) for s in range(A.rank)]
        lb = [("b", s) for s in range(B.rank)]
        la[sa] = lb[sb] = "k"
        new_labels, entries = _merge(la, dict(A.entries), lb, dict(B.entries), ["k"])
        slot_map = {}
        dims = []
        for pos, (side, s) in enumerate(new_labels):
            src = (a, s) if side == "a" else (b, s)
            slot_map[src] = (a, pos)
            dims.append(T.slot_dim(src))
        merged = TensorNode(a, tuple(dims), entries)
        others = {n.id for n in T.nodes if n.id not in (a, b)}
    nodes = [merged if n.id == a else n for n in T.nodes if n.id == a or n.id in others]
    edges = []
    for f, (p, q) in enumerate(T.edges):
        if f == e:
            continue
        edges.append((slot_map.get(p, p), slot_map.get(q, q)))
    return TensorNetwork(nodes, edges, T.global_scalar)


def plan_contraction(T: TensorNetwork) -> ContractionPlan:
    """Greedy plan: always take the merge whose result is estimated smallest.

    The size estimate of a merge is ``min(dense size, nnz_a * nnz_b)``; ties go
    to the smallest edge id.  Parallel edges between the same two groups are
    listed consecutively since they are consumed by one merge.
    """
    labels = {}
    size = {}
    for n in T.nodes:
        labels[n.id] = [None] * n.rank
        size[n.id] = len(n.entries)
    for e, (a, b) in enumerate(T.edges):
        labels[a[0]][a[1]] = e
        labels[b[0]][b[1]] = e
    dims = {}
    for e in range(len(T.edges)):
        dims[e] = T.bond_dim(e)
    for n in T.nodes:
        for s in range(n.rank):
            if labels[n.id][s] is None:
                labels[n.id][s] = ("p", n.id, s)
                dims[("p", n.id, s)] = n.dims[s]
    group = {n.id: n.id for n in T.nodes}
    remaining = set(range(len(T.edges)))
    order = []
    biggest = max(size.values(), default=0)
    while remaining:
        best = None
        for e in sorted(remaining):
            (a, _), (b, _) = T.edges[e]
            ga, gb = group[a], group[b]
            if ga == gb:
                rest = [lab for lab in labels[ga] if lab != e]
                cost = min(math.prod(dims[lab] for lab in rest), size[ga])
                key = (cost, e)
                if best is None or key < best[0]:
                    best = (key, ga, ga, [e])
                continue
            shared = sorted(lab for lab in set(labels[ga]) & set(labels[gb]) if isinstance(lab, int))
            rest = [lab for lab in labels[ga] + labels[gb] if lab not in shared]
            cost = min(math.prod(dims[lab] for lab in rest), size[ga] * size[gb])
            key = (cost, e)
            if best is None or key < best[0]:
                best = (key, min(ga, gb), max(ga, gb), sorted(shared))
        (cost, _), ga, gb, consumed = best
        if ga == gb:
            labs = list(labels[ga])
            for e in consumed:
                labs.remove(e)
                labs.remove(e)
            labels[ga] = labs
        else:
            labels[ga] = [lab for lab in labels[ga] + labels[gb] if lab not in consumed]
            del labels[gb]
            for nid, g in group.items():
                if g == gb:
                    group[nid] = ga
        size[ga] = cost
        biggest = max(biggest, cost)
        order.extend(consumed)
        remaining.difference_update(consumed)
    return ContractionPlan(tuple(order), biggest)


def _scalar_of(work) -> Scalar:
    total = ONE
    for labels, entries in work.values():
        assert not labels
        total = total * entries.get((), ZERO)
    return total


def contract_closed(T: TensorNetwork, order=None) -> Scalar:
    """Value of a closed network (global scalar included)."""
    if not T.is_closed():
        raise NotClosed(f"network has {len(T.physical_edges)} physical edges")
    order = plan_contraction(T).order if order is None else _check_order(T, order)
    work = _run(T, order)
    for nid, (labels, entries) in list(work.items()):
        work[nid] = _trace_self_loops(labels, entries)
    return T.global_scalar * _scalar_of(work)


def contract_open(T: TensorNetwork, order=None) -> dict:
    """Sparse amplitude table ``{x: T(x)}`` keyed by tuples in physical-edge order."""
    order = plan_contraction(T).order if order is None else _check_order(T, order)
    work = _run(T, order)
    labels, entries = [], {(): T.global_scalar} if T.global_scalar else {}
    for nid in sorted(work):
        lb, eb = _trace_self_loops(*work[nid])
        labels, entries = _merge(labels, entries, lb, eb, [])
    want = [("p", nid, s) for nid, s in T.physical_edges]
    perm = [labels.index(lab) for lab in want]
    return {tuple(idx[p] for p in perm): v for idx, v in entries.items()}


# -- evaluation ----------------------------------------------------------------


def _normalize_basis(T: TensorNetwork, x) -> dict:
    phys = T.physical_edges
    if isinstance(x, Mapping):
        x = {tuple(k): v for k, v in x.items()}
        if set(x) != set(phys):
            missing = sorted(set(phys) - set(x))
            extra = sorted(set(x) - set(phys))
            raise NotTotal(f"basis input mismatch: missing {missing}, unexpected {extra}")
    else:
        x = list(x)
        if len(x) != len(phys):
            raise NotTotal(f"expected {len(phys)} values, got {len(x)}")
        x = dict(zip(phys, x))
    for slot, v in x.items():
        if not 0 <= v < T.slot_dim(slot):
            raise IndexOutOfRange(f"value {v} out of range for physical edge {slot}")
    return x


def _attach(T: TensorNetwork, pieces) -> TensorNetwork:
    """Attach extra nodes; ``pieces`` is a list of (slots, dims, entries)."""
    next_id = max((n.id for n in T.nodes), default=-1) + 1
    nodes = list(T.nodes)
    edges = list(T.edges)
    for slots, dims, entries in pieces:
        nodes.append(TensorNode(next_id, dims, entries))
        for k, slot in enumerate(slots):
            edges.append((slot, (next_id, k)))
        next_id += 1
    return TensorNetwork(nodes, edges, T.global_scalar, check=False)


def pin_inputs(T: TensorNetwork, x) -> TensorNetwork:
    """Closed network obtained by attaching a one-hot node to every physical edge."""
    x = _normalize_basis(T, x)
    pieces = [([slot], (T.slot_dim(slot),), {(v,): ONE}) for slot, v in sorted(x.items())]
    return _attach(T, pieces)


def evaluate(T: TensorNetwork, x) -> Scalar:
    """T(x) for a basis input given as a mapping or a sequence in physical-edge order."""
    return contract_closed(pin_inputs(T, x))


def _normalize_vectors(T: TensorNetwork, psi: Mapping):
    phys = set(T.physical_edges)
    covered = set()
    pieces = []
    for key, vec in psi.items():
        key = tuple(key)
        slots = [key] if len(key) == 2 and all(isinstance(k, int) for k in key) else [tuple(k) for k in key]
        for slot in slots:
            if slot not in phys or slot in covered:
                raise NotTotal(f"vector input key {slot} is not an uncovered physical edge")
            covered.add(slot)
        dims = tuple(T.slot_dim(s) for s in slots)
        vec = list(vec)
        if len(vec) != math.prod(dims):
            raise LengthMismatch(f"vector for {slots} has length {len(vec)}, expected {math.prod(dims)}")
        entries = {
            idx: as_scalar(v) for idx, v in zip(itertools.product(*(range(d) for d in dims)), vec)
        }
        pieces.append((slots, dims, entries))
    if covered != phys:
        raise NotTotal(f"physical edges without input: {sorted(phys - covered)}")
    return pieces


def evaluate_vectors(T: TensorNetwork, psi: Mapping) -> Scalar:
    """Pair every physical edge with a vector, without conjugation.

    Keys are either one physical edge ``(node_id, slot)`` with a vector of its
    dimension, or a tuple of physical edges with a joint vector over their
    index space in row-major order.
    """
    return contract_closed(_attach(T, _normalize_vectors(T, psi)))


def iter_basis_inputs(T: TensorNetwork):
    """All basis inputs as tuples in physical-edge order, lexicographically."""
    dims = [T.slot_dim(s) for s in T.physical_edges]
    return itertools.product(*(range(d) for d in dims))


# -- brute-force oracle ----------------------------------------------------------


def brute_force_value(T: TensorNetwork, x=None, cap: int = DEFAULT_ENUMERATION_CAP) -> Scalar:
    """Sum over every labeling of the virtual edges of the product of node entries.

    Physical edges are pinned to ``x``.  Subtrees in which a fully labelled
    node reads zero contribute nothing and are skipped.
    """
    phys = T.physical_edges
    if phys and x is None:
        raise NotTotal("open network needs a basis input")
    pinned = _normalize_basis(T, x) if phys else {}
    m = len(T.edges)
    bond = [T.slot_dim(a) for a, _ in T.edges]
    total_labelings = math.prod(bond)
    if total_labelings > cap:
        raise TooLarge(f"{total_labelings} labelings exceed the cap {cap}")

    # each node slot reads either a pinned value or an edge label
    source = {}
    for e, (a, b) in enumerate(T.edges):
        source[a] = e
        source[b] = e
    ready = [[] for _ in range(m)]
    base = T.global_scalar
    for n in T.nodes:
        srcs = []
        for s in range(n.rank):
            if (n.id, s) in pinned:
                srcs.append(-1 - pinned[(n.id, s)])
            else:
                srcs.append(source[(n.id, s)])
        if all(v < 0 for v in srcs):
            base = base * n.entries.get(tuple(-1 - v for v in srcs), ZERO)
        else:
            ready[max(srcs)].append((srcs, n.entries))
    if not base:
        return ZERO

    label = [0] * m
    total = ZERO

    def visit(k, acc):
        nonlocal total
        if k == m:
            total = total + acc
            return
        for v in range(bond[k]):
            label[k] = v
            a = acc
            for srcs, entries in ready[k]:
                val = entries.get(tuple(label[s] if s >= 0 else -1 - s for s in srcs))
                if val is None:
                    break
                a = a * val
            else:
                visit(k + 1, a)

    visit(0, base)
    return total
