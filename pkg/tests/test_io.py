"""Tests for the text file readers and writers."""

import numpy as np
import pytest

from greedy_sbtm.inference.allocation import AllocationMatrix, read_allocation, write_allocation
from greedy_sbtm.ingestion import (
    InputError,
    read_cube,
    read_edge_list,
    read_key_values,
    read_presence,
    write_cube,
    write_node_ids,
)
from greedy_sbtm.models import read_manifest
from greedy_sbtm.models.priors import PriorSettings
from greedy_sbtm.simulation.params import ModelParameters, study_two_parameters


def test_cube_file_round_trip(tmp_path, three_node_cube):
    cube_path = tmp_path / "cube.txt"
    activity_path = tmp_path / "activity.txt"

    write_cube(three_node_cube, cube_path, activity_path)
    cube = read_cube(cube_path, activity_path)

    assert cube_path.read_text().splitlines() == ["3 2", "0 0 1", "1 0 1", "1 1 2"]
    assert (cube.active == three_node_cube.active).all()
    for t in range(2):
        assert (cube.x_dense(t) == three_node_cube.x_dense(t)).all()


def test_cube_without_activity_file_uses_degree(tmp_path):
    path = tmp_path / "cube.txt"
    path.write_text("# comment\n3 2\n0 0 1\n")
    cube = read_cube(path)
    assert cube.active.astype(int).tolist() == [[1, 0], [1, 0], [0, 0]]


@pytest.mark.parametrize(
    ("body", "line"),
    [
        ("3 2\n0 1 0\n", 2),
        ("3 2\n0 0 1\n0 0 1\n", 3),
        ("3 2\n0 0 5\n", 2),
        ("3 2\n0 0 x\n", 2),
        ("3\n", 1),
    ],
)
def test_cube_errors_name_the_line(tmp_path, body, line):
    path = tmp_path / "cube.txt"
    path.write_text(body)
    with pytest.raises(InputError) as excinfo:
        read_cube(path)
    assert excinfo.value.line_number == line
    assert f"cube.txt:{line}" in str(excinfo.value)


def test_empty_cube_file(tmp_path):
    path = tmp_path / "cube.txt"
    path.write_text("# nothing\n")
    with pytest.raises(InputError, match="empty cube file"):
        read_cube(path)


def test_activity_entry_out_of_range(tmp_path):
    cube_path = tmp_path / "cube.txt"
    cube_path.write_text("2 1\n")
    activity_path = tmp_path / "activity.txt"
    activity_path.write_text("0 0\n0 2\n")
    with pytest.raises(InputError) as excinfo:
        read_cube(cube_path, activity_path)
    assert excinfo.value.line_number == 2


def test_edge_list_accepts_commas_and_whitespace(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("# t a b\n0.5 1 2\n0.7,2,1\n\n1.5\t1\t3\n")
    events = read_edge_list(path, time_origin=0.0)
    assert len(events) == 3
    assert events.timestamps.tolist() == [0.5, 0.7, 1.5]
    assert events.time_origin == 0.0
    assert events.node_index().ids == ("1", "2", "3")


def test_edge_list_errors_name_the_line(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("0.5 1 2\n0.6 4 4\n")
    with pytest.raises(InputError, match="self-loop") as excinfo:
        read_edge_list(path)
    assert excinfo.value.line_number == 2

    path.write_text("0.5 1 2\nsoon 1 2\n")
    with pytest.raises(InputError, match="bad timestamp"):
        read_edge_list(path)

    path.write_text("0.5 1\n")
    with pytest.raises(InputError):
        read_edge_list(path)


def test_node_ids_file(tmp_path, three_node_cube):
    path = tmp_path / "node_ids.csv"
    write_node_ids(three_node_cube, path)
    assert path.read_text().splitlines() == ["index,node_id", "0,0", "1,1", "2,2"]


def test_allocation_round_trip(tmp_path, three_node_allocation):
    path = tmp_path / "z.csv"
    write_allocation(three_node_allocation, path)
    assert path.read_text().splitlines() == ["1,1", "1,2", "2,2"]
    assert read_allocation(path, k_up=2) == three_node_allocation


def test_allocation_infers_k_up(tmp_path):
    path = tmp_path / "z.csv"
    path.write_text("0,3\n1,0\n")
    z = read_allocation(path)
    assert z.k_up == 3
    assert z.labels.tolist() == [[0, 3], [1, 0]]


@pytest.mark.parametrize(
    ("body", "match"),
    [("1,1\n1\n", "frames"), ("1,a\n", "non-integer"), ("1,-1\n", "negative")],
)
def test_allocation_errors(tmp_path, body, match):
    path = tmp_path / "z.csv"
    path.write_text(body)
    with pytest.raises(InputError, match=match):
        read_allocation(path)


def test_prior_file(tmp_path):
    path = tmp_path / "hyper.txt"
    path.write_text("# priors\ndelta = 1.0\na_p: 2\n")
    priors = PriorSettings.from_file(path)
    assert priors.delta == 1.0
    assert priors.a_p == 2.0
    assert priors.b_q == 0.5


@pytest.mark.parametrize("body", ["gamma = 1\n", "delta = 0\n", "delta = many\n", "delta\n"])
def test_prior_file_errors(tmp_path, body):
    path = tmp_path / "hyper.txt"
    path.write_text("eta0 = 0.5\n" + body)
    with pytest.raises(InputError) as excinfo:
        PriorSettings.from_file(path)
    assert excinfo.value.line_number == 2


def test_params_file_round_trip(tmp_path):
    params = study_two_parameters()
    path = tmp_path / "params.txt"

    params.to_file(path, header={"seed": 7})
    loaded = ModelParameters.from_file(path)

    assert path.read_text().startswith("# seed: 7\nk = 3\n")
    for name in ("theta", "p", "q", "pi", "alpha"):
        np.testing.assert_allclose(getattr(loaded, name), getattr(params, name), rtol=0, atol=1e-15)


def test_params_file_without_pi_uses_persistent_transitions(tmp_path):
    path = tmp_path / "params.txt"
    path.write_text("theta = 0.5, 0.1; 0.1, 0.5\np = 0.2, 0.2; 0.2, 0.2\nq = 0.3, 0.3; 0.3, 0.3\n")
    params = ModelParameters.from_file(path, stay=0.8, allow_inactive=False)
    assert params.k == 2
    np.testing.assert_allclose(params.pi[1], [0.0, 0.8, 0.2])
    np.testing.assert_allclose(params.pi[0], [0.0, 0.5, 0.5])


@pytest.mark.parametrize(
    ("body", "line"),
    [
        ("theta = 0.5\nrho = 1\n", 2),
        ("theta = 0.5\np = 0.5, x\n", 2),
        ("theta = 0.5\np = 0.5; 0.5, 0.5\n", 2),
        ("k = 2\ntheta = 0.5\np = 0.5\nq = 0.5\n", 1),
    ],
)
def test_params_file_errors_name_the_line(tmp_path, body, line):
    path = tmp_path / "params.txt"
    path.write_text(body)
    with pytest.raises(InputError) as excinfo:
        ModelParameters.from_file(path)
    assert excinfo.value.line_number == line


def test_params_file_missing_required_key(tmp_path):
    path = tmp_path / "params.txt"
    path.write_text("theta = 0.5\n")
    with pytest.raises(InputError, match="missing required parameter 'p'"):
        ModelParameters.from_file(path)


def test_allocation_matrix_equality_uses_labels_and_bound():
    a = AllocationMatrix(np.array([[1, 0]]), k_up=2)
    assert a == AllocationMatrix(np.array([[1, 0]]), k_up=2)
    assert a != AllocationMatrix(np.array([[1, 0]]), k_up=3)


def test_key_value_reader(tmp_path):
    path = tmp_path / "values.txt"
    path.write_text("# header\n\nalpha = 1, 2; 3\nconfig.k_up: 10\nalpha = 4\nempty =\n")
    assert read_key_values(path) == {"alpha": ("4", 5), "config.k_up": ("10", 4), "empty": ("", 6)}


@pytest.mark.parametrize("body", ["a = 1\n= 2\n", "a = 1\njust text\n", "a = 1\n2x = 3\n"])
def test_key_value_reader_names_the_line(tmp_path, body):
    path = tmp_path / "values.txt"
    path.write_text(body)
    with pytest.raises(InputError, match="expected 'key = value'") as excinfo:
        read_key_values(path)
    assert excinfo.value.line_number == 2


def test_manifest_reader_rejects_malformed_lines(tmp_path):
    path = tmp_path / "manifest.txt"
    path.write_text("command = fit\nnot a pair\n")
    with pytest.raises(InputError):
        read_manifest(path)


def test_presence_file(tmp_path):
    path = tmp_path / "presence.txt"
    path.write_text("# t node_id\n0 bob\n1 alice\n1,bob\n")
    present = read_presence(path, ("alice", "bob", "carol"), 2)
    assert present.tolist() == [[False, True], [True, True], [False, False]]


@pytest.mark.parametrize(
    ("body", "match"),
    [
        ("0 alice\n2 alice\n", "frame 2 outside"),
        ("0 alice\n0 dave\n", "unknown node id"),
        ("0 alice\nx alice\n", "bad frame index"),
        ("0 alice\n0 alice bob\n", "expected 't node_id'"),
    ],
)
def test_presence_file_errors(tmp_path, body, match):
    path = tmp_path / "presence.txt"
    path.write_text(body)
    with pytest.raises(InputError, match=match) as excinfo:
        read_presence(path, ("alice", "bob"), 2)
    assert excinfo.value.line_number == 2
