import io

import networkx as nx
import numpy as np
import pytest

from posiplant.exceptions import ContractError
from posiplant.topology import (
    TABLE1_TARGETS,
    EdgeSet,
    apply_defects,
    by_name,
    chimera,
    complete,
    defects_to_counts,
    pegasus,
    random_graph,
    read_edge_list,
    write_edge_list,
    zephyr,
)


@pytest.mark.parametrize("make, nodes, edges", [
    (lambda: chimera(16), 2048, 6016),
    (lambda: chimera(2), 32, 80),
    (lambda: chimera(2, 2), 16, 24),
    (lambda: pegasus(16), 5640, 40484),
    (lambda: pegasus(2), 40, 164),
    (lambda: zephyr(4), 576, 5032),
    (lambda: zephyr(1), 48, 280),
    (lambda: complete(5), 5, 10),
])
def test_counts(make, nodes, edges):
    e = make()
    assert (e.num_vars, e.num_edges) == (nodes, edges)
    assert e.is_connected()
    assert not e.uncovered()


def test_degrees():
    assert chimera(4).degrees.max() == 6
    assert pegasus(16).degrees.max() == 15
    assert zephyr(4).degrees.max() == 20


def _same_graph(ours: EdgeSet, ref: nx.Graph):
    theirs = {tuple(sorted(p)) for p in ref.edges}
    return ours.num_vars == ref.number_of_nodes() and set(ours.edges) == theirs


def test_chimera_matches_reference():
    dnx = pytest.importorskip("dwave_networkx")
    for m in (1, 2, 4):
        assert _same_graph(chimera(m), dnx.chimera_graph(m))


def test_zephyr_matches_reference():
    dnx = pytest.importorskip("dwave_networkx")
    for m in (1, 2, 4):
        assert _same_graph(zephyr(m), dnx.zephyr_graph(m))


def test_pegasus_matches_reference():
    dnx = pytest.importorskip("dwave_networkx")
    for m in (2, 3, 6):
        ref = dnx.pegasus_graph(m, fabric_only=True)
        ref = nx.convert_node_labels_to_integers(ref, ordering="sorted")
        assert _same_graph(pegasus(m), ref)


def test_edge_set_canonical():
    e = EdgeSet(3, ((1, 0), (0, 1), (2, 1)))
    assert e.edges == ((0, 1), (1, 2))
    with pytest.raises(ContractError):
        EdgeSet(3, ((1, 1),))


def test_random_graph_reproducible():
    a, b = random_graph(30, 0.3, 4), random_graph(30, 0.3, 4)
    assert a == b
    assert a != random_graph(30, 0.3, 5)
    assert 0.15 < a.num_edges / (30 * 29 / 2) < 0.45


def test_defects_and_compact():
    e = apply_defects(chimera(2), 3, 5, seed=1)
    assert e.num_active == 29 and len(e.inactive) == 3
    assert all(v not in e.inactive for p in e.edges for v in p)
    c, old = e.compact()
    assert c.num_vars == 29 and c.num_edges == e.num_edges
    assert set(old.tolist()) == set(e.active_nodes)
    with pytest.raises(ContractError):
        apply_defects(chimera(1), 9, 0, seed=0)


@pytest.mark.parametrize("device", sorted(TABLE1_TARGETS))
def test_defects_hit_device_counts(device):
    kind, size, qubits, couplers = TABLE1_TARGETS[device]
    e = defects_to_counts(by_name(kind, size), qubits, couplers, seed=0)
    assert (e.num_active, e.num_edges) == (qubits, couplers)


def test_edge_list_roundtrip(tmp_path):
    e = apply_defects(zephyr(1), 2, 3, seed=9)
    path = tmp_path / "z.edges"
    write_edge_list(e, path)
    assert read_edge_list(path) == e
    buf = io.StringIO()
    write_edge_list(complete(3), buf)
    assert buf.getvalue().splitlines()[0] == "n 3"


def test_by_name_errors():
    with pytest.raises(ContractError):
        by_name("hexagon", 3)
    with pytest.raises(ContractError):
        by_name("random", 5)
