import json

import pytest
from hypothesis import given

from cliquefactor.constructions import complete_partite
from cliquefactor.core import GeneralHypergraph
from cliquefactor.instance_io import (InstanceFormatError, dumps_edge_list, general_from_dict,
                                      general_to_dict, load_general, load_partite,
                                      loads_edge_list, loads_general_edge_list, parse_vertex,
                                      partite_from_dict, partite_to_dict, save_partite)

from oracles import partite_hosts


def test_parse_vertex():
    assert parse_vertex("c3.v10") == (3, 10)
    with pytest.raises(InstanceFormatError):
        parse_vertex("v3.c1")


@given(partite_hosts())
def test_json_round_trip(H):
    assert partite_from_dict(json.loads(json.dumps(partite_to_dict(H)))) == H


@given(partite_hosts())
def test_edge_list_round_trip(H):
    assert loads_edge_list(dumps_edge_list(H)) == H


def test_edge_list_errors_carry_line_numbers():
    with pytest.raises(InstanceFormatError, match="line 3"):
        loads_edge_list("3 2 2 2 2\nc0.v0 c1.v0\nc0.v0 c0.v1\n")
    with pytest.raises(InstanceFormatError, match="line 1"):
        loads_edge_list("3 x 2 2 2\n")


def test_file_round_trip(tmp_path):
    H = complete_partite(3, 2, 2)
    for fmt, name in [("json", "a.json"), ("edgelist", "a.txt")]:
        save_partite(H, tmp_path / name, fmt)
        assert load_partite(tmp_path / name) == H
    with pytest.raises(ValueError):
        save_partite(H, tmp_path / "x", "yaml")


def test_general_formats(tmp_path):
    G = GeneralHypergraph(4, 3, [(0, 1, 2), (1, 2, 3)])
    assert general_from_dict(general_to_dict(G)).edges == G.edges
    text = "4 3\n0 1 2\n1 2 3\n"
    assert loads_general_edge_list(text).edges == G.edges
    (tmp_path / "g.txt").write_text(text)
    assert load_general(tmp_path / "g.txt").edges == G.edges
    with pytest.raises(InstanceFormatError, match="line 2"):
        loads_general_edge_list("4 3\n0 1 9\n")
