"""Text formats: network, witness, DIMACS 2-CNF, edge-list and Hamiltonian files.

Network and witness files are JSON with 1-based slots and index values.
Numbers are exact: a rational is ``"p/q"`` (or ``"p"``), a complex entry is
a ``[re, im]`` pair of rationals.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

from .core import ONE, Scalar, TensorNetwork, TensorNode
from .errors import InvalidFormula, ParseError, TNZError
from .hamiltonian import HamiltonianInstance, LocalTerm, ProjectorGuess, scalar_matrix
from .reduce import Cnf2, SimpleGraph


def format_rational(q: Fraction) -> str:
    return str(q)


def format_scalar(s: Scalar) -> str:
    """Canonical ``"p/q + r/s i"`` form; the imaginary part is omitted when zero."""
    return str(s)


def scalar_pair(s: Scalar) -> list:
    return [str(s.re), str(s.im)]


def parse_rational(text) -> Fraction:
    if isinstance(text, bool) or isinstance(text, float):
        raise ParseError(f"not an exact rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not re.fullmatch(r"\s*[+-]?\d+(/\d+)?\s*", text):
        raise ParseError(f"not a rational 'p/q': {text!r}")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {text!r}") from None


def parse_scalar(value) -> Scalar:
    """A ``[re, im]`` pair, a single rational, or a ``"p/q + r/s i"`` string."""
    if isinstance(value, list):
        if len(value) != 2:
            raise ParseError(f"complex value must be [re, im], got {value!r}")
        return Scalar(parse_rational(value[0]), parse_rational(value[1]))
    if isinstance(value, str) and value.strip().endswith("i"):
        try:
            return Scalar.parse(value)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad complex value {value!r}") from None
    return Scalar(parse_rational(value))


# -- networks ----------------------------------------------------------------------


def network_to_dict(T: TensorNetwork) -> dict:
    nodes = []
    for n in sorted(T.nodes, key=lambda n: n.id):
        entries = {
            ",".join(str(i + 1) for i in idx): scalar_pair(v)
            for idx, v in sorted(n.entries.items())
        }
        nodes.append({"id": n.id, "dims": list(n.dims), "entries": entries})
    edges = [[a, sa + 1, b, sb + 1] for (a, sa), (b, sb) in T.edges]
    return {"nodes": nodes, "edges": edges, "global_scalar": scalar_pair(T.global_scalar)}


def dumps_network(T: TensorNetwork) -> str:
    return json.dumps(network_to_dict(T), indent=1) + "\n"


def network_from_dict(doc) -> TensorNetwork:
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise ParseError("network document needs a 'nodes' list")
    try:
        nodes = []
        for nd in doc["nodes"]:
            dims = [int(d) for d in nd.get("dims", [])]
            entries = {}
            for key, val in nd.get("entries", {}).items():
                idx = tuple(int(i) - 1 for i in key.split(",")) if key.strip() else ()
                if idx in entries:
                    raise ParseError(f"node {nd['id']}: index {key} given twice")
                entries[idx] = parse_scalar(val)
            nodes.append(TensorNode(int(nd["id"]), dims, entries))
        edges = []
        for e in doc.get("edges", []):
            a, sa, b, sb = (int(v) for v in e)
            edges.append(((a, sa - 1), (b, sb - 1)))
        g = parse_scalar(doc["global_scalar"]) if "global_scalar" in doc else ONE
    except TNZError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed network document: {exc}") from None
    return TensorNetwork(nodes, edges, g)


def loads_network(text: str) -> TensorNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return network_from_dict(doc)


def read_network(path) -> TensorNetwork:
    with open(path) as fh:
        return loads_network(fh.read())


# -- witnesses ---------------------------------------------------------------------

_SLOT_KEY = re.compile(r"\(\s*(-?\d+)\s*,\s*(\d+)\s*\)")


def format_slot(slot) -> str:
    return f"({slot[0]},{slot[1] + 1})"


def parse_slot(text: str):
    m = _SLOT_KEY.fullmatch(text.strip())
    if not m:
        raise ParseError(f"physical edge key must look like '(node,slot)', got {text!r}")
    return int(m.group(1)), int(m.group(2)) - 1


def witness_to_dict(x=None, labeling=None, vectors=None) -> dict:
    doc = {}
    if x is not None:
        doc["x"] = {format_slot(s): v + 1 for s, v in sorted(x.items())}
    if labeling is not None:
        doc["labeling"] = {str(e + 1): v + 1 for e, v in sorted(labeling.items())}
    if vectors is not None:
        vec = {}
        for key, values in vectors.items():
            slots = [key] if isinstance(key[0], int) else list(key)
            vec[";".join(format_slot(s) for s in slots)] = [scalar_pair(v) for v in values]
        doc["vectors"] = vec
    return doc


def witness_from_dict(doc) -> dict:
    """Returns a dict with any of ``x``, ``labeling``, ``vectors`` in library form."""
    if not isinstance(doc, dict):
        raise ParseError("witness document must be an object")
    out = {}
    try:
        if "x" in doc:
            out["x"] = {parse_slot(k): int(v) - 1 for k, v in doc["x"].items()}
        if "labeling" in doc:
            out["labeling"] = {int(k) - 1: int(v) - 1 for k, v in doc["labeling"].items()}
        if "vectors" in doc:
            vec = {}
            for k, values in doc["vectors"].items():
                slots = tuple(parse_slot(p) for p in k.split(";"))
                key = slots[0] if len(slots) == 1 else slots
                vec[key] = [parse_scalar(v) for v in values]
            out["vectors"] = vec
    except TNZError:
        raise
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed witness document: {exc}") from None
    return out


def read_witness(path) -> dict:
    with open(path) as fh:
        try:
            return witness_from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None


# -- DIMACS and graphs -------------------------------------------------------------


def parse_dimacs(text: str) -> Cnf2:
    """DIMACS CNF restricted to clauses of exactly two literals."""
    num_vars = None
    declared = None
    tokens = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad problem line {line!r}")
            num_vars, declared = int(parts[2]), int(parts[3])
            continue
        tokens.extend(line.split())
    if num_vars is None:
        raise ParseError("missing 'p cnf <vars> <clauses>' line")
    clauses, current = [], []
    for tok in tokens:
        try:
            lit = int(tok)
        except ValueError:
            raise ParseError(f"bad literal {tok!r}") from None
        if lit == 0:
            clauses.append(current)
            current = []
        else:
            current.append(lit)
    if current:
        clauses.append(current)
    for c in clauses:
        if len(c) != 2:
            raise InvalidFormula(f"clause {c} has {len(c)} literals; only 2-CNF is supported")
    if declared is not None and declared != len(clauses):
        raise ParseError(f"header declares {declared} clauses, found {len(clauses)}")
    return Cnf2.from_ints(num_vars, clauses)


def format_dimacs(phi: Cnf2) -> str:
    lines = [f"p cnf {phi.num_vars} {len(phi.clauses)}"]
    for c in phi.clauses:
        lines.append(" ".join(str(v if p else -v) for v, p in c) + " 0")
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> SimpleGraph:
    """One ``u v`` pair per line, 1-based; the vertex count is the largest label."""
    pairs = []
    for line in text.splitlines():
        line = line.split("#")[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"edge line must be 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"bad edge line {line!r}") from None
        if u < 1 or v < 1:
            raise ParseError(f"vertices are 1-based, got {line!r}")
        pairs.append((u - 1, v - 1))
    n = max((max(p) for p in pairs), default=-1) + 1
    return SimpleGraph(n, pairs)


# -- Hamiltonians ------------------------------------------------------------------


def _matrix(rows):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("matrix must be a list of rows")
    return scalar_matrix([[parse_scalar(v) for v in r] for r in rows])


def _guesses(items):
    return [
        ProjectorGuess(int(g["i"]) - 1, _matrix(g["matrix"]), parse_scalar(g.get("lambda", "1")))
        for g in items
    ]


def hamiltonian_from_dict(doc):
    """Returns ``(instance, guesses or None)``.  Supports and term indices are 1-based."""
    try:
        terms = [
            LocalTerm(tuple(int(q) - 1 for q in t["support"]), _matrix(t["matrix"]))
            for t in doc["terms"]
        ]
        H = HamiltonianInstance(
            int(doc["n"]), int(doc["D"]), terms,
            parse_scalar(doc.get("alpha", "0")), parse_scalar(doc.get("beta", "0")),
        )
        guesses = _guesses(doc["guesses"]) if "guesses" in doc else None
    except TNZError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed Hamiltonian document: {exc}") from None
    return H, guesses


def read_hamiltonian(path):
    with open(path) as fh:
        try:
            return hamiltonian_from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None


def read_guesses(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    try:
        return _guesses(doc["guesses"] if isinstance(doc, dict) else doc)
    except TNZError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed guesses document: {exc}") from None


def hamiltonian_to_dict(H, guesses=None) -> dict:
    def rows(M):
        return [[scalar_pair(v) for v in r] for r in M]

    doc = {
        "n": H.n,
        "D": H.D,
        "terms": [{"support": [q + 1 for q in t.support], "matrix": rows(t.matrix)} for t in H.terms],
        "alpha": str(H.alpha.re),
        "beta": str(H.beta.re),
    }
    if guesses is not None:
        doc["guesses"] = [
            {"i": g.term + 1, "matrix": rows(g.matrix), "lambda": str(g.eigenvalue.re)}
            for g in guesses
        ]
    return doc
