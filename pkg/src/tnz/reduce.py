"""Compilers from counting, coloring and Hamiltonian problems to tensor networks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .contract import contract_closed
from .core import ONE, Scalar, TensorNetwork, TensorNode, as_scalar
from .errors import (
    EmptyNetwork,
    GuessRejected,
    InvalidFormula,
    InvalidGraph,
    InvalidInstance,
    NotClosed,
    SupportOutOfRange,
    TooSmall,
)


@dataclass(frozen=True)
class Cnf2:
    """2-CNF formula.  Variables are numbered ``1..num_vars``; a literal is
    ``(var, positive)``."""

    num_vars: int
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(
            tuple((int(v), bool(p)) for v, p in clause) for clause in self.clauses
        ))
        if self.num_vars < 0:
            raise InvalidFormula("negative variable count")
        for c in self.clauses:
            if len(c) != 2:
                raise InvalidFormula(f"clause {c} does not have exactly 2 literals")
            for v, _ in c:
                if not 1 <= v <= self.num_vars:
                    raise InvalidFormula(f"variable {v} outside 1..{self.num_vars}")

    @classmethod
    def from_ints(cls, num_vars: int, clauses) -> "Cnf2":
        """Build from DIMACS-style signed integers, e.g. ``[[1, -2], [2, 3]]``."""
        out = []
        for c in clauses:
            if any(lit == 0 for lit in c):
                raise InvalidFormula("literal 0 is not a variable")
            out.append(tuple((abs(lit), lit > 0) for lit in c))
        return cls(num_vars, tuple(out))

    def satisfied_by(self, assignment) -> bool:
        """``assignment[v-1]`` is the truth value of variable ``v``."""
        return all(any(assignment[v - 1] == p for v, p in c) for c in self.clauses)


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected simple graph on vertices ``0..n-1``."""

    n: int
    edges: tuple

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        seen = set()
        for u, v in edges:
            if u == v:
                raise InvalidGraph(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidGraph(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            key = frozenset((u, v))
            if key in seen:
                raise InvalidGraph(f"duplicate edge ({u}, {v})")
            seen.add(key)
        object.__setattr__(self, "edges", edges)


@dataclass(frozen=True)
class GtnzInstance:
    network: TensorNetwork
    alpha: Scalar
    beta: Scalar

    def __post_init__(self):
        a, b = as_scalar(self.alpha), as_scalar(self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        if not (a.is_real() and b.is_real()):
            raise InvalidInstance("thresholds must be real")
        if not (a.re >= b.re >= 0 and a.re - b.re >= 1):
            raise InvalidInstance(f"need alpha >= beta >= 0 and alpha - beta >= 1, got {a}, {b}")


# -- #2SAT ---------------------------------------------------------------------


def compile_sharp2sat(phi: Cnf2) -> TensorNetwork:
    """Closed network whose contraction counts the satisfying assignments.

    Variable ``v`` is node ``v`` (an all-equal check over its occurrences);
    clause ``j`` (1-based) is node ``num_vars + j``.  Edge value 1 means true.
    """
    t = phi.num_vars
    occurrences = {v: 0 for v in range(1, t + 1)}
    edges = []
    for j, clause in enumerate(phi.clauses, start=1):
        for pos, (v, _) in enumerate(clause):
            edges.append(((v, occurrences[v]), (t + j, pos)))
            occurrences[v] += 1
    nodes = []
    for v in range(1, t + 1):
        deg = occurrences[v]
        if deg == 0:
            nodes.append(TensorNode(v, (), {(): 2}))
        else:
            nodes.append(TensorNode(v, (2,) * deg, {(0,) * deg: 1, (1,) * deg: 1}))
    for j, clause in enumerate(phi.clauses, start=1):
        (_, p1), (_, p2) = clause
        entries = {
            (a, b): 1 for a in (0, 1) for b in (0, 1) if a == int(p1) or b == int(p2)
        }
        nodes.append(TensorNode(t + j, (2, 2), entries))
    return TensorNetwork(nodes, edges)


def compile_sharp2sat_threshold(phi: Cnf2, k: int) -> GtnzInstance:
    """The count network scaled by ``2^t / k`` with thresholds ``2^t`` and
    ``2^t (k-1) / k``: its value reaches ``alpha`` iff at least ``k`` models."""
    t = phi.num_vars
    if not 1 <= k <= 2**t:
        raise InvalidInstance(f"k={k} outside 1..{2**t}")
    T = compile_sharp2sat(phi)
    scaled = T.replace(global_scalar=Scalar(Fraction(2**t, k)))
    return GtnzInstance(scaled, Scalar(2**t), Scalar(Fraction(2**t * (k - 1), k)))


# -- additive shift ------------------------------------------------------------


def _components(T: TensorNetwork):
    """Connected components (by node id) of the nodes that carry edges."""
    parent = {n.id: n.id for n in T.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (a, _), (b, _) in T.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    comps = {}
    for n in T.nodes:
        if n.rank:
            comps.setdefault(find(n.id), []).append(n.id)
    return sorted(sorted(c) for c in comps.values())


def add_scalar(T: TensorNetwork, N) -> TensorNetwork:
    """Closed network with the same graph, every bond one wider, and value ``M + N``.

    The extra value of each bond is the SWITCH label.  A node whose edges are
    all non-SWITCH behaves as before; a node seeing both kinds outputs 0; a
    node whose edges are all SWITCH outputs ``N`` at the distinguished node
    (smallest id among nodes with edges) and 1 elsewhere.

    Degenerate parts are folded so the value stays exact: 0-slot nodes are
    set to 1 and their product moves into the distinguished node's ordinary
    entries.  If the edges form several components, every component but the
    first gets all-SWITCH weight ``1 - M_c`` at its smallest node, so its
    factor is ``M_c + (1 - M_c) = 1`` in the SWITCH sector; this needs the
    component values and therefore contracts them.
    """
    N = as_scalar(N)
    if not T.nodes:
        raise EmptyNetwork("network has no nodes")
    if not T.is_closed():
        raise NotClosed("add_scalar needs a closed network")

    isolated = ONE
    for n in T.nodes:
        if n.rank == 0:
            isolated = isolated * n.entries.get((), 0)

    if not T.edges:
        M = T.global_scalar * isolated
        star = min(n.id for n in T.nodes)
        nodes = [TensorNode(n.id, (), {(): (M + N) if n.id == star else 1}) for n in T.nodes]
        return TensorNetwork(nodes, [], 1)

    comps = _components(T)
    star = comps[0][0]
    g = T.global_scalar
    switch_weight = {}
    if len(comps) == 1:
        switch_weight[star] = N
    else:
        values = [contract_closed(_restrict(T, c)) for c in comps]
        total = g * isolated
        for v in values:
            total = total * v
        for c, v in zip(comps[1:], values[1:]):
            switch_weight[c[0]] = 1 - v
        # ordinary sector of the first component carries g * isolated * M_1
        switch_weight[star] = total + N - g * isolated * values[0]

    nodes = []
    for n in T.nodes:
        if n.rank == 0:
            nodes.append(TensorNode(n.id, (), {(): 1}))
            continue
        dims = tuple(d + 1 for d in n.dims)
        entries = dict(n.entries)
        if n.id == star:
            scale = g * isolated
            entries = {k: v * scale for k, v in entries.items()}
        entries[tuple(n.dims)] = switch_weight.get(n.id, ONE)
        nodes.append(TensorNode(n.id, dims, entries))
    return TensorNetwork(nodes, T.edges, 1)


def _restrict(T: TensorNetwork, ids) -> TensorNetwork:
    ids = set(ids)
    nodes = [n for n in T.nodes if n.id in ids]
    edges = [e for e in T.edges if e[0][0] in ids]
    return TensorNetwork(nodes, edges, 1, check=False)


# -- edge coloring -------------------------------------------------------------


def compile_edge_coloring(G: SimpleGraph, c: int) -> TensorNetwork:
    """Closed 0/1 network counting proper ``c``-edge-colorings of ``G``.

    Vertex ``u`` becomes node ``u + 1`` with one slot per incident edge, in
    edge-list order.
    """
    if c < 1:
        raise InvalidGraph("need at least one color")
    slots = {u: 0 for u in range(G.n)}
    edges = []
    for u, v in G.edges:
        edges.append(((u + 1, slots[u]), (v + 1, slots[v])))
        slots[u] += 1
        slots[v] += 1
    nodes = []
    for u in range(G.n):
        deg = slots[u]
        entries = {idx: 1 for idx in itertools.permutations(range(c), deg)}
        nodes.append(TensorNode(u + 1, (c,) * deg, entries))
    return TensorNetwork(nodes, edges)


# -- commuting local Hamiltonians ----------------------------------------------


def compile_clh(H, guesses, x, check_threshold: bool = True) -> TensorNetwork:
    """Network for ``D^n * Pi_H |x>`` where ``Pi_H`` is the product of the guessed projectors.

    ``x`` is a sequence of ``n`` values in ``0..D-1``.  Projectors are attached
    in ascending term order.  Physical edges are listed per qudit by
    :func:`clh_open_legs`; :func:`clh_basis_input` builds basis inputs for them.
    """
    from .hamiltonian import verify_projector_guess

    n, D = H.n, H.D
    x = list(x)
    if len(x) != n or any(not 0 <= v < D for v in x):
        raise SupportOutOfRange(f"basis string {x} is not in [{D}]^{n}")
    guesses = sorted(guesses, key=lambda g: g.term)
    terms = [g.term for g in guesses]
    if len(set(terms)) != len(terms):
        raise GuessRejected("more than one guess for the same term")
    for g in guesses:
        if not verify_projector_guess(H, g):
            raise GuessRejected(f"guess for term {g.term} is not a valid eigenspace projector")
    if check_threshold:
        total = sum((g.eigenvalue for g in guesses), Scalar(0))
        if total.re > H.alpha.re:
            raise GuessRejected(f"eigenvalue sum {total} exceeds alpha {H.alpha}")

    nodes = [TensorNode(q + 1, (D,), {(x[q],): 1}) for q in range(n)]
    edges = []
    legs = [(q + 1, 0) for q in range(n)]
    for g in guesses:
        support = H.terms[g.term].support
        for q in support:
            if not 0 <= q < n:
                raise SupportOutOfRange(f"qudit {q} outside 0..{n - 1}")
        k = len(support)
        nid = n + 1 + g.term
        entries = {}
        for col in itertools.product(range(D), repeat=k):
            for row in itertools.product(range(D), repeat=k):
                v = g.matrix[_flat(row, D)][_flat(col, D)]
                if v:
                    entries[col + row] = v
        nodes.append(TensorNode(nid, (D,) * (2 * k), entries))
        for pos, q in enumerate(support):
            edges.append((legs[q], (nid, pos)))
            legs[q] = (nid, k + pos)
    return TensorNetwork(nodes, edges, Scalar(D) ** n)


def clh_open_legs(H, guesses) -> list:
    """Open leg ``(node_id, slot)`` carrying each qudit of a compiled CLH network.

    Qudit ``q`` starts on one-hot node ``q + 1``; the projector of term ``i``
    is node ``n + 1 + i`` with inputs at slots ``0..k-1`` and outputs at
    ``k..2k-1``.
    """
    legs = [(q + 1, 0) for q in range(H.n)]
    for g in sorted(guesses, key=lambda g: g.term):
        support = H.terms[g.term].support
        k = len(support)
        for pos, q in enumerate(support):
            legs[q] = (H.n + 1 + g.term, k + pos)
    return legs


def clh_basis_input(H, guesses, y) -> dict:
    """Basis input for a compiled CLH network assigning ``y[q]`` to qudit ``q``."""
    return {leg: y[q] for q, leg in enumerate(clh_open_legs(H, guesses))}


def _flat(idx, D):
    out = 0
    for i in idx:
        out = out * D + i
    return out


# -- long-range MPS fixture -----------------------------------------------------


def build_bell_mps(n: int) -> TensorNetwork:
    """Bond-2 open chain for ``|0 0..0 0> + |1 0..0 1>`` on ``n`` qubits.

    Node ``i`` (1-based) has its physical edge at slot 0; interior nodes have
    the left bond at slot 1 and the right bond at slot 2.
    """
    if n < 3:
        raise TooSmall("the chain needs at least 3 sites")
    ends = {(0, 0): 1, (1, 1): 1}
    inner = {(0, 0, 0): 1, (0, 1, 1): 1}
    nodes = [TensorNode(1, (2, 2), ends)]
    nodes += [TensorNode(i, (2, 2, 2), inner) for i in range(2, n)]
    nodes.append(TensorNode(n, (2, 2), ends))
    edges = [((1, 1), (2, 1))]
    edges += [((i, 2), (i + 1, 1)) for i in range(2, n - 1)]
    edges.append(((n - 1, 2), (n, 1)))
    return TensorNetwork(nodes, edges)
