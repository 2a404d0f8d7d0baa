"""Random instance generators and independent oracles shared by the tests."""
import itertools
from fractions import Fraction

import numpy as np

from tnz.core import Scalar, TensorNetwork, TensorNode
from tnz.hamiltonian import identity, scalar_matrix
from tnz.reduce import Cnf2

VALUES = [Scalar(1), Scalar(2), Scalar(-1), Scalar(Fraction(1, 2)), Scalar(0, 1),
          Scalar(Fraction(-3, 2), 2), Scalar(3)]


def random_network(rng, max_nodes=8, max_dim=3, max_edges=9, physical=0,
                   closed=True, values=VALUES, density=0.7, connected=False):
    """Random valid network; ``physical`` extra open slots are scattered over nodes."""
    n = rng.randint(1, max_nodes)
    slots = {i: [] for i in range(1, n + 1)}
    edges = []
    m = rng.randint(0, max_edges)
    order = list(range(1, n + 1))
    if connected:
        # spanning tree first so the edge-bearing part is connected
        for k in range(2, n + 1):
            m = max(m, n - 1)
            u = rng.randint(1, k - 1)
            d = rng.randint(1, max_dim)
            edges.append(((u, len(slots[u])), (k, len(slots[k]))))
            slots[u].append(d)
            slots[k].append(d)
    while len(edges) < m:
        u, v = rng.choice(order), rng.choice(order)
        d = rng.randint(1, max_dim)
        su = len(slots[u])
        slots[u].append(d)
        sv = len(slots[v])
        slots[v].append(d)
        edges.append(((u, su), (v, sv)))
    if not closed:
        for _ in range(physical):
            u = rng.choice(order)
            slots[u].append(rng.randint(1, max_dim))
    nodes = []
    for i in order:
        dims = tuple(slots[i])
        entries = {}
        for idx in itertools.product(*(range(d) for d in dims)):
            if rng.random() < density:
                entries[idx] = rng.choice(values)
        nodes.append(TensorNode(i, dims, entries))
    g = rng.choice([Scalar(1), Scalar(1), Scalar(Fraction(2, 3)), Scalar(-2)])
    return TensorNetwork(nodes, edges, g)


def random_cnf2(rng, max_vars=10, max_clauses=15):
    t = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        clauses.append(tuple((rng.randint(1, t), rng.random() < 0.5) for _ in range(2)))
    return Cnf2(t, tuple(clauses))


def truth_table_count(phi: Cnf2) -> int:
    return sum(
        1 for bits in itertools.product((False, True), repeat=phi.num_vars) if phi.satisfied_by(bits)
    )


def count_edge_colorings(n, edges, c) -> int:
    """Backtracking count of proper edge colorings, independent of any network."""
    incident = {v: [] for v in range(n)}
    for i, (u, v) in enumerate(edges):
        incident[u].append(i)
        incident[v].append(i)
    color = [None] * len(edges)

    def rec(i):
        if i == len(edges):
            return 1
        u, v = edges[i]
        used = {color[j] for j in incident[u] + incident[v] if color[j] is not None}
        total = 0
        for col in range(c):
            if col not in used:
                color[i] = col
                total += rec(i + 1)
                color[i] = None
        return total

    return rec(0)


# -- Hamiltonian helpers ----------------------------------------------------------

PAULI = {
    "I": [[1, 0], [0, 1]],
    "X": [[0, 1], [1, 0]],
    "Z": [[1, 0], [0, -1]],
}


def kron(*mats):
    out = scalar_matrix([[1]])
    for m in mats:
        out = np.kron(out, m if isinstance(m, np.ndarray) else scalar_matrix(m))
    return out


def pauli(word):
    return kron(*(PAULI[c] for c in word))


def half_plus(P, sign=1):
    """(I + sign * P) / 2."""
    I = identity(P.shape[0])
    return (I + P * Scalar(sign)) * Scalar(Fraction(1, 2))


def diag(values):
    n = len(values)
    return scalar_matrix([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])


def clause_projector(p1, p2):
    """Diagonal projector onto assignments of two bits satisfying (l1 or l2)."""
    return diag([1 if (a == int(p1) or b == int(p2)) else 0 for a in (0, 1) for b in (0, 1)])


def dense_state_product(n, D, ops):
    """Dense product of operators given as (support, matrix), via explicit index maps."""
    dim = D**n
    out = identity(dim)
    basis = list(itertools.product(range(D), repeat=n))
    for support, M in ops:
        full = np.full((dim, dim), Scalar(0), dtype=object)
        for r, row in enumerate(basis):
            for c, col in enumerate(basis):
                if any(row[q] != col[q] for q in range(n) if q not in support):
                    continue
                mr = sum(row[q] * D ** (len(support) - 1 - i) for i, q in enumerate(support))
                mc = sum(col[q] * D ** (len(support) - 1 - i) for i, q in enumerate(support))
                full[r, c] = M[mr, mc]
        out = out @ full
    return out


# -- injective networks --------------------------------------------------------


def _unflat(j, dims):
    out = []
    for d in reversed(dims):
        out.append(j % d)
        j //= d
    return tuple(reversed(out))


def injective_chain(rng, k, max_bonds=2, max_bond_dim=2, values=VALUES):
    """Chain of ``k`` nodes, each an injective map from its bonds to its slot 0.

    Returns ``(network, node_matrices)``.  Each matrix is upper triangular with
    a non-zero diagonal on its first ``c`` rows, so it has full column rank;
    any interval of the chain is then an injective block.
    """
    slots = {i: [None] for i in range(1, k + 1)}
    edges = []
    for i in range(1, k):
        for _ in range(rng.randint(1, max_bonds)):
            d = rng.randint(1, max_bond_dim)
            edges.append(((i, len(slots[i])), (i + 1, len(slots[i + 1]))))
            slots[i].append(d)
            slots[i + 1].append(d)
    nodes, mats = [], {}
    for i in range(1, k + 1):
        bonds = slots[i][1:]
        c = 1
        for d in bonds:
            c *= d
        p = c + rng.randint(0, 1)
        A = [[Scalar(0)] * c for _ in range(p)]
        for r in range(p):
            for j in range(c):
                if r == j:
                    A[r][j] = rng.choice(values)
                elif r < j or r >= c:
                    A[r][j] = rng.choice(values + [Scalar(0)])
        entries = {(r,) + _unflat(j, bonds): A[r][j] for r in range(p) for j in range(c)}
        nodes.append(TensorNode(i, (p,) + tuple(bonds), entries))
        mats[i] = A
    g = rng.choice([Scalar(1), Scalar(Fraction(-3, 4)), Scalar(2, 1)])
    return TensorNetwork(nodes, edges, g), mats


def random_intervals(rng, k, max_len=2):
    out, i = [], 1
    while i <= k:
        j = min(k, i + rng.randint(0, max_len - 1))
        out.append(list(range(i, j + 1)))
        i = j + 1
    return out


def gram_full_rank(matrix) -> bool:
    """Full column rank via det(A^H A) != 0, computed with sympy."""
    import sympy

    A = sympy.Matrix([[sympy.Rational(v.re.numerator, v.re.denominator)
                       + sympy.I * sympy.Rational(v.im.numerator, v.im.denominator)
                       for v in row] for row in matrix])
    return sympy.simplify((A.H * A).det()) != 0
