"""Certificates of non-zeroness and the counting loop built on a gTNZ oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .contract import (
    DEFAULT_ENUMERATION_CAP,
    contract_closed,
    contract_open,
    plan_contraction,
)
from .core import ONE, ZERO, Scalar, TensorNetwork, TensorNode
from .errors import (
    DisconnectedBlock,
    InvalidWitness,
    NoPhysicalEdge,
    NotAPartition,
    NotInjective,
    NotNonNegative,
    OutOfRange,
    SolveFailed,
    TooLarge,
)
from .linalg import rank, solve, transpose
from .reduce import Cnf2, GtnzInstance, add_scalar, compile_sharp2sat, compile_sharp2sat_threshold


@dataclass(frozen=True)
class NonNegWitness:
    """Basis input ``x`` (physical edge -> value) plus a labeling (edge id -> value)."""

    x: dict
    labeling: dict


def _is_nonneg(v: Scalar) -> bool:
    return v.is_real() and v.re >= 0


def check_nonnegative(T: TensorNetwork) -> None:
    if not _is_nonneg(T.global_scalar):
        raise NotNonNegative(f"global scalar {T.global_scalar} is not a non-negative real")
    for n in T.nodes:
        for idx, v in n.entries.items():
            if not _is_nonneg(v):
                raise NotNonNegative(f"node {n.id} has entry {v} at {idx}")


def verify_nonneg_witness(T: TensorNetwork, w: NonNegWitness) -> bool:
    """True iff the product of node entries under ``w`` is positive, hence ``T(x) > 0``."""
    check_nonnegative(T)
    phys = T.physical_edges
    x = {tuple(k): v for k, v in w.x.items()}
    if set(x) != set(phys):
        raise InvalidWitness("witness input does not cover exactly the physical edges")
    if set(w.labeling) != set(range(len(T.edges))):
        raise InvalidWitness("witness labeling does not cover exactly the virtual edges")
    value = {}
    for slot, v in x.items():
        if not 0 <= v < T.slot_dim(slot):
            raise InvalidWitness(f"value {v} out of range at {slot}")
        value[slot] = v
    for e, v in w.labeling.items():
        if not 0 <= v < T.bond_dim(e):
            raise InvalidWitness(f"label {v} out of range on edge {e}")
        a, b = T.edges[e]
        value[a] = value[b] = v
    product = T.global_scalar
    for n in T.nodes:
        product = product * n.entries.get(tuple(value[(n.id, s)] for s in range(n.rank)), ZERO)
    return product.re > 0


def search_nonneg_witness(T: TensorNetwork):
    """Backtracking search for a positive labeling; None when ``T`` is the zero vector.

    Physical edges are assigned first, then virtual edges (by smaller
    endpoint), each in ``(node_id, slot)`` order and smallest value first.  A
    partial assignment is abandoned once some node has no positive entry
    consistent with it.
    """
    check_nonnegative(T)
    if not T.global_scalar:
        return None
    phys = T.physical_edges
    virt = sorted(range(len(T.edges)), key=lambda e: min(T.edges[e]))
    variables = [("p", s) for s in phys] + [("e", e) for e in virt]
    touches = []
    dims = []
    for kind, ref in variables:
        if kind == "p":
            touches.append([ref])
            dims.append(T.slot_dim(ref))
        else:
            touches.append(list(T.edges[ref]))
            dims.append(T.bond_dim(ref))
    support = {n.id: [idx for idx, v in n.entries.items() if v.re > 0] for n in T.nodes}
    if any(not rows for rows in support.values()):
        return None
    assigned = {n.id: {} for n in T.nodes}

    def consistent(nid):
        fixed = assigned[nid].items()
        return any(all(idx[s] == v for s, v in fixed) for idx in support[nid])

    values = [0] * len(variables)

    def visit(k):
        if k == len(variables):
            return True
        for v in range(dims[k]):
            for nid, s in touches[k]:
                assigned[nid][s] = v
            if all(consistent(nid) for nid, _ in touches[k]) and visit(k + 1):
                values[k] = v
                return True
            for nid, s in touches[k]:
                del assigned[nid][s]
        return False

    if not visit(0):
        return None
    x, labeling = {}, {}
    for (kind, ref), v in zip(variables, values):
        if kind == "p":
            x[ref] = v
        else:
            labeling[ref] = v
    return NonNegWitness(x, labeling)


# -- injective networks -------------------------------------------------------------


@dataclass(frozen=True)
class BlockMap:
    """Matrix of the map from a block's boundary bonds to its physical edges.

    Rows run over physical multi-indices, columns over boundary multi-indices,
    both row-major in ``(node_id, slot)`` order.
    """

    block: tuple
    physical: tuple
    boundary: tuple
    matrix: list


def _check_partition(T: TensorNetwork, blocks):
    blocks = [tuple(sorted(b)) for b in blocks]
    ids = set(T.node_ids)
    seen = set()
    for b in blocks:
        if not b:
            raise NotAPartition("empty block")
        for nid in b:
            if nid not in ids:
                raise NotAPartition(f"node {nid} is not in the network")
            if nid in seen:
                raise NotAPartition(f"node {nid} appears in two blocks")
            seen.add(nid)
    if seen != ids:
        raise NotAPartition(f"nodes {sorted(ids - seen)} are in no block")
    phys = set(T.physical_edges)
    for b in blocks:
        members = set(b)
        reach = {b[0]}
        frontier = [b[0]]
        while frontier:
            u = frontier.pop()
            for (p, _), (q, _) in T.edges:
                for src, dst in ((p, q), (q, p)):
                    if src == u and dst in members and dst not in reach:
                        reach.add(dst)
                        frontier.append(dst)
        if reach != members:
            raise DisconnectedBlock(f"block {list(b)} is not connected")
        if not any(slot[0] in members for slot in phys):
            raise NoPhysicalEdge(f"block {list(b)} has no physical edge")
    return blocks


def block_map(T: TensorNetwork, block, cap: int = DEFAULT_ENUMERATION_CAP) -> BlockMap:
    members = set(block)
    nodes = [n for n in T.nodes if n.id in members]
    inner = [e for e in T.edges if e[0][0] in members and e[1][0] in members]
    sub = TensorNetwork(nodes, inner, 1, check=False)
    phys = set(T.physical_edges)
    open_slots = sub.physical_edges
    physical = tuple(s for s in open_slots if s in phys)
    boundary = tuple(s for s in open_slots if s not in phys)
    n_rows = math.prod(T.slot_dim(s) for s in physical)
    n_cols = math.prod(T.slot_dim(s) for s in boundary)
    if n_rows * n_cols > cap:
        raise TooLarge(f"block map {n_rows}x{n_cols} exceeds the cap {cap}")
    amplitudes = contract_open(sub)
    pos_p = [open_slots.index(s) for s in physical]
    pos_b = [open_slots.index(s) for s in boundary]
    dims_p = [T.slot_dim(s) for s in physical]
    dims_b = [T.slot_dim(s) for s in boundary]
    matrix = [[ZERO] * n_cols for _ in range(n_rows)]
    for idx, v in amplitudes.items():
        r = _flat([idx[p] for p in pos_p], dims_p)
        c = _flat([idx[p] for p in pos_b], dims_b)
        matrix[r][c] = v
    return BlockMap(tuple(sorted(members)), physical, boundary, matrix)


def _flat(idx, dims):
    out = 0
    for i, d in zip(idx, dims):
        out = out * d + i
    return out


def check_injective(T: TensorNetwork, blocks, cap: int = DEFAULT_ENUMERATION_CAP) -> bool:
    """True iff every block's boundary-to-physical map has full column rank.

    A zero global scalar makes the whole network zero, so it is never accepted.
    """
    blocks = _check_partition(T, blocks)
    if not T.global_scalar:
        return False
    for b in blocks:
        L = block_map(T, b, cap)
        if rank(L.matrix) != len(L.matrix[0]):
            return False
    return True


def injective_certificate(T: TensorNetwork, blocks, cap: int = DEFAULT_ENUMERATION_CAP) -> dict:
    """Vector input on which the network evaluates to exactly 1.

    Each block receives a joint vector ``psi`` over its physical edges with
    ``L^T psi`` equal to the all-zeros boundary basis vector, so every cut
    bond only sees the label 0.  Keys are the block's physical edges (a single
    ``(node_id, slot)`` when the block has one).
    """
    blocks = _check_partition(T, blocks)
    if not check_injective(T, blocks, cap):
        raise NotInjective("partition does not give injective block maps")
    out = {}
    scale = T.global_scalar.inverse()
    for i, b in enumerate(blocks):
        L = block_map(T, b, cap)
        n_cols = len(L.matrix[0])
        target = [ONE] + [ZERO] * (n_cols - 1)
        psi = solve(transpose(L.matrix), target)
        if psi is None:
            raise SolveFailed(f"no preimage for block {list(b)} despite full column rank")
        if i == 0:
            psi = [v * scale for v in psi]
        key = L.physical[0] if len(L.physical) == 1 else L.physical
        out[key] = psi
    return out


# -- basis witnesses ------------------------------------------------------------


def _doubled(T: TensorNetwork, pins: dict) -> TensorNetwork:
    """Closed network for the squared norm of ``T`` with some physical edges pinned."""
    offset = max((n.id for n in T.nodes), default=0) + 1
    nodes = list(T.nodes)
    edges = list(T.edges)
    for n in T.nodes:
        nodes.append(TensorNode(n.id + offset, n.dims,
                                {k: v.conjugate() for k, v in n.entries.items()}))
    for (a, sa), (b, sb) in T.edges:
        edges.append(((a + offset, sa), (b + offset, sb)))
    next_id = 2 * offset
    for nid, s in T.physical_edges:
        mirror = (nid + offset, s)
        if (nid, s) in pins:
            hot = {(pins[(nid, s)],): ONE}
            d = (T.slot_dim((nid, s)),)
            nodes.append(TensorNode(next_id, d, hot))
            nodes.append(TensorNode(next_id + 1, d, hot))
            edges.append(((nid, s), (next_id, 0)))
            edges.append((mirror, (next_id + 1, 0)))
            next_id += 2
        else:
            edges.append(((nid, s), mirror))
    g = T.global_scalar
    return TensorNetwork(nodes, edges, Scalar(g.abs2()), check=False)


def basis_witness_peel(T: TensorNetwork, cap: int = DEFAULT_ENUMERATION_CAP):
    """A basis input ``x`` with ``T(x) != 0``, fixing edges smallest value first; None if ``T == 0``."""

    def norm2(pins):
        D = _doubled(T, pins)
        plan = plan_contraction(D)
        if plan.max_intermediate > cap:
            raise TooLarge(f"doubled network intermediate {plan.max_intermediate} exceeds {cap}")
        return contract_closed(D, plan.order)

    pins = {}
    if not norm2(pins):
        return None
    for slot in T.physical_edges:
        for a in range(T.slot_dim(slot)):
            pins[slot] = a
            if norm2(pins):
                break
        else:
            raise SolveFailed(f"no value keeps the norm non-zero at {slot}")
    return pins


# -- oracles and counting ---------------------------------------------------------


class ExactOracle:
    """gTNZ decided exactly: YES iff some ``|T(x)| > beta``.

    This answers YES whenever some ``|T(x)| >= alpha`` and NO whenever all
    ``|T(x)| <= beta``, as required of any oracle.  ``calls`` counts queries.
    """

    def __init__(self, cap: int = DEFAULT_ENUMERATION_CAP):
        self.cap = cap
        self.calls = 0

    def __call__(self, instance: GtnzInstance) -> bool:
        self.calls += 1
        T = instance.network
        beta2 = instance.beta.abs2()
        if T.is_closed():
            return contract_closed(T).abs2() > beta2
        size = math.prod(T.slot_dim(s) for s in T.physical_edges)
        if size > self.cap:
            raise TooLarge(f"{size} basis inputs exceed the cap {self.cap}")
        return any(v.abs2() > beta2 for v in contract_open(T).values())


def decide_at_least_k(phi: Cnf2, k: int, oracle, loop_cap=None) -> bool:
    """Whether ``phi`` has at least ``k`` models, via shifted networks.

    For each candidate count ``k'`` from ``k`` upward (at most ``loop_cap``
    extra candidates) the count network shifted by ``-k'`` is queried with
    thresholds 1 and 0; an oracle NO means the count equals ``k'``.
    """
    t = phi.num_vars
    if not 1 <= k <= 2**t:
        raise OutOfRange(f"k={k} outside 1..{2**t}")
    last = 2**t if loop_cap is None else min(2**t, k + loop_cap)
    base = compile_sharp2sat(phi)
    for guess in range(k, last + 1):
        if not oracle(GtnzInstance(add_scalar(base, -guess), 1, 0)):
            return True
    return False


def decide_at_least_k_threshold(phi: Cnf2, k: int, oracle) -> bool:
    """Single query on the ``2^t / k``-scaled count network."""
    t = phi.num_vars
    if not 1 <= k <= 2**t:
        raise OutOfRange(f"k={k} outside 1..{2**t}")
    return oracle(compile_sharp2sat_threshold(phi, k))


def count_via_gtnz(phi: Cnf2, oracle=None) -> int:
    """Exact model count by binary search over thresholded queries (``t + 1`` of them)."""
    oracle = ExactOracle() if oracle is None else oracle
    lo, hi = 0, 2**phi.num_vars
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if decide_at_least_k_threshold(phi, mid, oracle):
            lo = mid
        else:
            hi = mid - 1
    return lo
