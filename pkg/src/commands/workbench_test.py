import csv
import json
from fractions import Fraction

import pydot
import pytest

from abstract.alliance_spec import dump_spec, load_spec
from abstract.topology import TopologyMatrix, serialize_topology, write_topology
from analysis import fixtures
from commands.workbench import Workbench


@pytest.fixture
def workbench() -> Workbench:
    return Workbench()


@pytest.fixture
def grid_file(tmp_path):
    def write(t: TopologyMatrix, name: str = "topology.txt") -> str:
        path = tmp_path / name
        write_topology(t, str(path))
        return str(path)

    return write


@pytest.fixture
def spec_file(tmp_path):
    def write(spec, name: str = "spec.json") -> str:
        path = tmp_path / name
        path.write_text(dump_spec(spec))
        return str(path)

    return write


def test_analyze_maximal(workbench, grid_file):
    result = workbench.cmd_analyze(grid_file(fixtures.TWO_BY_TWO))
    assert result["exit_code"] == 0
    assert result["human_text"].startswith("maximal, DoF 1/2")
    assert result["machine_payload"]["alignment_sets"] == [[1, 2], [3, 4]]


def test_analyze_suggests_a_link(workbench, grid_file):
    result = workbench.cmd_analyze(grid_file(TopologyMatrix.identity(4)))
    assert result["exit_code"] == 1
    assert "link from transmitter 2 to receiver 1 can be added" in result["human_text"]


def test_analyze_names_the_internal_conflict(workbench, grid_file):
    result = workbench.cmd_analyze(grid_file(fixtures.SIX_USER_CONFLICT))
    assert result["exit_code"] == 1
    assert "receiver 4 hears W5" in result["human_text"]
    assert result["machine_payload"]["is_dof_optimal"] is False


def test_analyze_for_third(workbench, grid_file):
    result = workbench.cmd_analyze(grid_file(fixtures.SEVEN_USER_SPARSE), dof=Fraction(1, 3))
    assert result["exit_code"] == 1
    for column in ("W2", "W4", "W7"):
        assert f"column {column} carries 1 interference blocks" in result["human_text"]

    assert workbench.cmd_analyze(grid_file(fixtures.SEVEN_USER_DOF_THIRD), dof=Fraction(1, 3))["exit_code"] == 0


def test_analyze_writes_dot(workbench, grid_file, tmp_path):
    out = tmp_path / "graph.dot"
    workbench.cmd_analyze(grid_file(fixtures.TWO_BY_TWO), dot=str(out))
    assert pydot.graph_from_dot_data(out.read_text())[0].get_name().strip('"') == "messages"


def test_input_errors_exit_2(workbench, grid_file, tmp_path):
    assert workbench.cmd_analyze(str(tmp_path / "missing.txt"))["exit_code"] == 2

    bad = tmp_path / "bad.txt"
    bad.write_text("12\n11\n")
    result = workbench.cmd_analyze(str(bad))
    assert result["exit_code"] == 2
    assert "non-binary character" in result["human_text"]


def test_construct(workbench, spec_file, tmp_path):
    out = tmp_path / "six.txt"
    result = workbench.cmd_construct(spec_file(fixtures.six_user_spec()), out=str(out))
    assert result["exit_code"] == 0
    assert result["human_text"] == serialize_topology(fixtures.SIX_USER)
    assert out.read_text() == serialize_topology(fixtures.SIX_USER) + "\n"


def test_construct_then_analyze(workbench, spec_file, tmp_path):
    out = tmp_path / "derived.txt"
    for spec in (fixtures.two_by_two_spec(), fixtures.three_plus_one_spec(), fixtures.cyclic_spec()):
        assert workbench.cmd_construct(spec_file(spec), out=str(out))["exit_code"] == 0
        assert workbench.cmd_analyze(str(out))["exit_code"] == 0


def test_construct_generalized(workbench, spec_file):
    result = workbench.cmd_construct(spec_file(fixtures.seven_user_spec()))
    assert result["exit_code"] == 0
    assert result["machine_payload"]["dof"] == "1/3"


def test_construct_rejects_uncovered_pair(workbench, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(
        json.dumps(
            {
                "k": 3,
                "alliances": [
                    {"suballiances": [{"messages": [1], "interferers": [2]}]},
                    {"suballiances": [{"messages": [2], "interferers": [1]}]},
                    {"suballiances": [{"messages": [3], "interferers": [1]}]},
                ],
            }
        )
    )
    result = workbench.cmd_construct(str(path))
    assert result["exit_code"] == 2
    assert "pair-uncovered: alliances (2, 3)" in result["human_text"]


def test_construct_single_user(workbench, spec_file):
    result = workbench.cmd_construct(spec_file(fixtures.single_user_spec()))
    assert result["exit_code"] == 0
    assert result["human_text"] == "1\ndegenerate single-user channel"


def test_analyze_single_user_skips_blocks(workbench, grid_file):
    result = workbench.cmd_analyze(grid_file(TopologyMatrix.identity(1)))
    assert result["exit_code"] == 0
    assert result["human_text"] == "maximal, DoF 1/2\n1\ndegenerate single-user channel"
    assert result["machine_payload"]["violations"] == []


def test_transform(workbench, grid_file):
    result = workbench.cmd_transform(grid_file(fixtures.EIGHT_USER), strategy="merge")
    assert result["exit_code"] == 0
    assert result["human_text"].startswith(serialize_topology(fixtures.EIGHT_USER_MERGED))
    added = fixtures.EIGHT_USER_MERGED.added_links(fixtures.EIGHT_USER)
    assert len(result["machine_payload"]["added_links"]) == len(added)

    unchanged = workbench.cmd_transform(grid_file(fixtures.NINE_USER))
    assert unchanged["machine_payload"]["added_links"] == []


def test_transform_reports_conflict(workbench, grid_file):
    result = workbench.cmd_transform(grid_file(fixtures.SIX_USER_CONFLICT))
    assert result["exit_code"] == 1
    assert result["machine_payload"]["conflict"] == [4, 5]


def test_enumerate(workbench, tmp_path):
    out = tmp_path / "catalog.csv"
    result = workbench.cmd_enumerate(3, canonical=True, csv=str(out))
    assert result["exit_code"] == 0
    assert result["human_text"].splitlines()[0].endswith("5 maximal in 2 classes")
    with open(out, newline="") as file:
        rows = list(csv.DictReader(file))
    assert len(rows) == 16


def test_enumerate_refuses_large_k(workbench):
    assert workbench.cmd_enumerate(6)["exit_code"] == 2


def test_verify_theorems(workbench):
    result = workbench.cmd_verify_theorems(3)
    assert result["exit_code"] == 0
    assert result["human_text"].splitlines()[0] == "5 maximal / 64 total, all iff checks pass"
    assert result["machine_payload"]["maximal"] == 5

    probed = workbench.cmd_verify_theorems(3, converse=1)
    assert probed["machine_payload"]["checks"][-1]["name"] == "converse-e1"


def test_verify_dof(workbench, grid_file, spec_file):
    result = workbench.cmd_verify_dof(grid_file(fixtures.TWO_BY_TWO), trials=3)
    assert result["exit_code"] == 0
    assert result["machine_payload"]["dof"] == "1/2"

    failed = workbench.cmd_verify_dof(grid_file(fixtures.SIX_USER_CONFLICT))
    assert failed["exit_code"] == 1
    assert "receiver 4 cannot separate W4" in failed["human_text"]

    third = workbench.cmd_verify_dof(
        grid_file(fixtures.SEVEN_USER_DOF_THIRD), spec_path=spec_file(fixtures.seven_user_spec())
    )
    assert third["machine_payload"]["dof"] == "1/3"

    rejected = workbench.cmd_verify_dof(grid_file(fixtures.TWO_BY_TWO), extension=-1)
    assert rejected["exit_code"] == 2
    assert rejected["human_text"].startswith("error: extension must be at least 1 slot")


def test_bound(workbench, grid_file):
    result = workbench.cmd_bound(grid_file(fixtures.TWO_BY_TWO))
    assert result["exit_code"] == 0
    assert result["human_text"] == "achievable 1/2, upper 1/2, tight"

    unclassified = workbench.cmd_bound(grid_file(TopologyMatrix.identity(3)))
    assert unclassified["exit_code"] == 1


def test_export_dot(workbench, grid_file):
    result = workbench.cmd_export_dot(grid_file(fixtures.TWO_BY_TWO))
    graph = pydot.graph_from_dot_data(result["human_text"])[0]
    assert graph.get_name().strip('"') == "messages"
    assert len(graph.get_edges()) == result["machine_payload"]["edges"]


def test_specs(workbench):
    result = workbench.cmd_specs(3, 3)
    lines = result["human_text"].splitlines()
    assert len(lines) == 2
    assert all(load_spec(line).n == 3 for line in lines)
    assert workbench.cmd_specs(3, 3, count_only=True)["human_text"] == "2"


def test_payloads_are_repeatable(workbench, grid_file):
    path = grid_file(fixtures.SIX_USER)
    first = json.dumps(workbench.cmd_verify_dof(path)["machine_payload"])
    second = json.dumps(Workbench().cmd_verify_dof(path)["machine_payload"])
    assert first == second
