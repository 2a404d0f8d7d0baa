import json
import random

import pytest

from generators import random_cnf2, random_network
from tnz import io
from tnz.cli import main
from tnz.contract import contract_closed, evaluate
from tnz.core import Scalar, TensorNetwork, TensorNode
from tnz.errors import InvalidFormula, ParseError
from tnz.hamiltonian import HamiltonianInstance, LocalTerm
from tnz.reduce import SimpleGraph, build_bell_mps, compile_edge_coloring

K4_EDGES = "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n"
PETERSEN_EDGES = "\n".join(
    f"{u + 1} {v + 1}" for u, v in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (1, 6), (2, 7),
                                    (3, 8), (4, 9), (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)]
)


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _net(tmp_path, name, T):
    return _write(tmp_path, name, io.dumps_network(T))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# -- formats --------------------------------------------------------------------


def test_network_round_trip():
    rng = random.Random(3)
    for _ in range(30):
        T = random_network(rng, max_nodes=4, max_edges=4, closed=False, physical=2)
        text = io.dumps_network(T)
        assert io.loads_network(text) == T
        assert io.dumps_network(io.loads_network(text)) == text


def test_network_file_is_one_based():
    T = TensorNetwork([TensorNode(7, (2, 3), {(1, 2): Scalar(1, -2)})], [((7, 0), (7, 1))], check=False)
    doc = io.network_to_dict(T)
    assert doc["nodes"][0]["entries"] == {"2,3": ["1", "-2"]}
    assert doc["edges"] == [[7, 1, 7, 2]]


def test_scalar_parsing():
    assert io.parse_scalar(["1/2", "-3"]) == Scalar(Scalar.parse("1/2 - 3 i"))
    assert io.parse_scalar("7/3") == Scalar.parse("7/3")
    with pytest.raises(ParseError):
        io.parse_scalar("0.5")


def test_witness_round_trip():
    x = {(1, 0): 1, (3, 2): 0}
    labeling = {0: 2, 4: 0}
    vectors = {(1, 0): [Scalar(1), Scalar(0, 1)], ((2, 0), (3, 0)): [Scalar(1)] * 4}
    doc = io.witness_to_dict(x=x, labeling=labeling, vectors=vectors)
    assert doc["x"] == {"(1,1)": 2, "(3,3)": 1}
    assert io.witness_from_dict(json.loads(json.dumps(doc))) == {
        "x": x, "labeling": labeling, "vectors": vectors,
    }


def test_dimacs_round_trip():
    rng = random.Random(1)
    for _ in range(20):
        phi = random_cnf2(rng)
        assert io.parse_dimacs(io.format_dimacs(phi)) == phi
    with pytest.raises(InvalidFormula):
        io.parse_dimacs("p cnf 3 1\n1 2 3 0\n")
    with pytest.raises(ParseError):
        io.parse_dimacs("1 2 0\n")


def test_edge_list():
    G = io.parse_edge_list(K4_EDGES)
    assert G == SimpleGraph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    with pytest.raises(ParseError):
        io.parse_edge_list("0 1\n")


def test_hamiltonian_round_trip():
    H = HamiltonianInstance(2, 2, [LocalTerm((1, 0), [[1, 0, 0, 0], [0, 0, 0, 0],
                                                      [0, 0, 0, 0], [0, 0, 0, 1]])], alpha=1)
    H2, guesses = io.hamiltonian_from_dict(json.loads(json.dumps(io.hamiltonian_to_dict(H))))
    assert guesses is None
    assert H2.terms[0].support == (1, 0) and (H2.terms[0].matrix == H.terms[0].matrix).all()


# -- commands -------------------------------------------------------------------


def test_cmd_contract(tmp_path, capsys):
    K4 = compile_edge_coloring(io.parse_edge_list(K4_EDGES), 3)
    assert run(capsys, "contract", _net(tmp_path, "k4.json", K4))[:2] == (0, "6\n")
    five = TensorNetwork([TensorNode(1, (), {(): 5})])
    assert run(capsys, "contract", _net(tmp_path, "five.json", five))[:2] == (0, "5\n")
    code, _, err = run(capsys, "contract", _net(tmp_path, "open.json", build_bell_mps(3)))
    assert code == 2 and "NotClosed" in err


def test_cmd_contract_is_deterministic(tmp_path, capsys):
    path = _net(tmp_path, "k4.json", compile_edge_coloring(io.parse_edge_list(K4_EDGES), 3))
    first = run(capsys, "contract", path)
    assert run(capsys, "contract", path) == first


def test_cmd_tnz(tmp_path, capsys):
    code, out, _ = run(capsys, "tnz", _net(tmp_path, "bell.json", build_bell_mps(4)))
    assert code == 0 and out.startswith("YES")
    assert json.loads(out.splitlines()[1])["x"] == {f"({i},1)": 1 for i in range(1, 5)}
    zero = TensorNetwork([TensorNode(1, (2,), {})])
    assert run(capsys, "tnz", _net(tmp_path, "zero.json", zero))[:2] == (1, "NO\n")


def test_cmd_tnz_with_witness(tmp_path, capsys):
    K4 = compile_edge_coloring(io.parse_edge_list(K4_EDGES), 3)
    net = _net(tmp_path, "k4.json", K4)
    good = {0: 0, 5: 0, 1: 1, 4: 1, 2: 2, 3: 2}
    w = _write(tmp_path, "w.json", json.dumps(io.witness_to_dict(x={}, labeling=good)))
    assert run(capsys, "tnz", net, "--witness", w)[:2] == (0, "YES\n")
    bad = _write(tmp_path, "b.json", json.dumps(io.witness_to_dict(x={}, labeling={e: 0 for e in range(6)})))
    assert run(capsys, "tnz", net, "--witness", bad)[:2] == (1, "NO\n")


def test_cmd_tnz_thresholds(tmp_path, capsys):
    net = _net(tmp_path, "bell.json", build_bell_mps(3))
    assert run(capsys, "tnz", net, "--alpha", "2", "--beta", "1")[0] == 1
    assert run(capsys, "tnz", net, "--alpha", "1", "--beta", "1")[0] == 2


def test_cmd_reduce(tmp_path, capsys):
    dimacs = _write(tmp_path, "f.cnf", "p cnf 2 1\n1 2 0\n")
    code, out, _ = run(capsys, "reduce", "sharp2sat", dimacs)
    assert code == 0
    assert run(capsys, "contract", _write(tmp_path, "f.json", out))[1] == "3\n"
    edges = _write(tmp_path, "p.txt", PETERSEN_EDGES)
    code, out, _ = run(capsys, "reduce", "ecol", edges, "--colors", 3)
    assert contract_closed(io.loads_network(out)) == 0
    code, out, _ = run(capsys, "reduce", "bellmps", "--n", 4)
    assert evaluate(io.loads_network(out), (0, 0, 0, 0)) == 1
    assert run(capsys, "reduce", "ecol", edges)[0] == 2


def test_cmd_count(tmp_path, capsys):
    assert run(capsys, "count", _write(tmp_path, "a.cnf", "p cnf 2 1\n1 2 0\n"))[:2] == (0, "3\n")
    assert run(capsys, "count", _write(tmp_path, "b.cnf", "p cnf 3 0\n"))[:2] == (0, "8\n")
    contra = _write(tmp_path, "c.cnf", "p cnf 1 2\n1 1 0\n-1 -1 0\n")
    assert run(capsys, "count", contra)[:2] == (0, "0\n")


def _chain(first):
    eye = {(0, 0): 1, (1, 1): 1}
    return TensorNetwork([TensorNode(1, (2, 2), first), TensorNode(2, (2, 2), eye)], [((1, 1), (2, 1))])


def test_cmd_injective(tmp_path, capsys):
    good = _net(tmp_path, "eye.json", _chain({(0, 0): 1, (1, 1): 1}))
    code, out, _ = run(capsys, "injective", good, "--partition", "1;2", "--certify")
    assert code == 0 and out.splitlines()[0] == "YES" and out.splitlines()[-1] == "evaluation: 1"
    bad = _net(tmp_path, "rank1.json", _chain({(0, 0): 1, (0, 1): 1}))
    assert run(capsys, "injective", bad, "--partition", "1;2")[:2] == (1, "NO\n")
    bell = _net(tmp_path, "bell.json", build_bell_mps(4))
    code, _, err = run(capsys, "injective", bell, "--partition", "1,3;2,4")
    assert code == 2 and "DisconnectedBlock" in err


def _stoq_file(tmp_path, name, n, terms):
    doc = {"n": n, "D": 2, "terms": [{"support": s, "matrix": m} for s, m in terms]}
    return _write(tmp_path, name, json.dumps(doc))


def test_cmd_stoq(tmp_path, capsys):
    eye = [["1", "0"], ["0", "1"]]
    code, out, _ = run(capsys, "stoq", _stoq_file(tmp_path, "id.json", 1, [([1], eye)]))
    assert code == 0 and out.splitlines()[1] == "x = 0"
    ortho = [([1], [["1", "0"], ["0", "0"]]), ([1], [["0", "0"], ["0", "1"]])]
    assert run(capsys, "stoq", _stoq_file(tmp_path, "o.json", 1, ortho))[:2] == (1, "NO\n")
    clause = [[1 if (a or b) and r == c else 0 for c in range(4)] for r, (a, b) in
              enumerate([(0, 0), (0, 1), (1, 0), (1, 1)])]
    code, out, _ = run(capsys, "stoq", _stoq_file(tmp_path, "c.json", 2, [([1, 2], clause)]))
    assert code == 0 and out.splitlines()[1] == "x = 01"


def test_bad_input_exit_code(tmp_path, capsys):
    assert run(capsys, "contract", _write(tmp_path, "junk.json", "{"))[0] == 2
    assert run(capsys, "contract", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "nosuchcommand")[0] == 2
