import json
import pickle

import pytest

from gridcon.entities import parse_token as T
from gridcon.errors import NetworkError
from gridcon.network import Network, dumps_network, load_network, read_network, save_network, write_network


def test_empty_document():
    net = load_network({"entities": [], "idrs": []})
    assert len(net.entities) == 0


def small_doc():
    return {
        "entities": ["P1", "P2", "PL1_2", "C1_1_1_1"],
        "idrs": ["P2 <- P1", "C1_1_1_1 <- P1 # P2"],
        "edges": {"pp": [["P1", "P2"]], "pc": [["P1", "C1_1_1_1"]], "cc": []},
        "annotations": {"generators": ["P1"], "pmu_buses": ["P2"], "substations": {}, "control_centers": []},
        "initial_states": {"P1": 1},
        "hardened": ["P2"],
    }


def test_load_small():
    net = load_network(small_doc())
    assert net.states[T("P1")] == 1 and net.states[T("P2")] == 2
    assert net.hardened == {T("P2")}
    assert net.links[T("PL1_2")] == (T("P1"), T("P2"))


def test_round_trip_small():
    net = load_network(small_doc())
    assert load_network(save_network(net)) == net
    assert load_network(json.loads(dumps_network(net))) == net


def test_round_trip_datasets(net14, net118):
    for net in (net14, net118):
        assert load_network(save_network(net)) == net


def test_file_round_trip(tmp_path, net14):
    path = tmp_path / "n.json"
    write_network(net14, path)
    assert read_network(path) == net14


def test_undeclared_leaf():
    doc = small_doc()
    doc["idrs"].append("P1 <- P9")
    with pytest.raises(NetworkError):
        load_network(doc)


def test_duplicate_idr():
    doc = small_doc()
    doc["idrs"].append("P2 <- C1_1_1_1")
    with pytest.raises(NetworkError):
        load_network(doc)


@pytest.mark.parametrize("edge", [("pp", ["P1", "C1_1_1_1"]), ("pc", ["P1", "P2"]), ("pp", ["P1", "P1"])])
def test_malformed_edges(edge):
    doc = small_doc()
    doc["edges"][edge[0]].append(edge[1])
    with pytest.raises(NetworkError):
        load_network(doc)


def test_bad_state_value():
    doc = small_doc()
    doc["initial_states"]["P2"] = 3
    with pytest.raises(NetworkError):
        load_network(doc)


def test_read_errors(tmp_path):
    with pytest.raises(NetworkError):
        read_network(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(NetworkError):
        read_network(bad)


def test_views(net14):
    assert len(net14.buses) == 14
    assert net14.neighbors(T("P8"), "pp") == {T("P7")}
    assert T("P12") in net14.substations[6].buses
    assert net14.substation_of(T("P12")) == 6


def test_derived_copies(net14):
    failed = net14.with_states({T("P12"): 0})
    assert failed.failed() == {T("P12")}
    assert net14.failed() == set() or not net14.failed()
    h = net14.with_hardened([T("P7")])
    assert T("P7") in h.hardened and not net14.hardened


def test_pickle(net14):
    assert pickle.loads(pickle.dumps(net14)) == net14


def test_without_edges(net14):
    iso = net14.without_edges_of(T("P7"))
    assert not iso.neighbors(T("P7"), "pp")
    assert iso.idrs == net14.idrs


def test_network_is_unhashable_value(net14):
    with pytest.raises(TypeError):
        hash(net14)
    assert Network() == Network()
