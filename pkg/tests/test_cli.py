import json

import pytest

from ridexplain.cli import main
from ridexplain.explanations import Scenario, save_scenarios
from ridexplain.pricing import TripQuote


@pytest.fixture
def grid(tmp_path):
    assert main(["gen-graph", "--rows", "4", "--cols", "4", "--spacing", "0.8", "--jitter", "0.1",
                 "--seed", "2", "--out", str(tmp_path / "net")]) == 0
    return tmp_path / "net"


def test_graph_apsp_quote(tmp_path, grid, capsys):
    assert main(["apsp", "--net", str(grid), "--out", str(tmp_path / "m")]) == 0
    assert (tmp_path / "m.npz").exists()
    capsys.readouterr()
    assert main(["quote", "--apsp", str(tmp_path / "m.npz"), "--origin", "0", "--dest", "15"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["shared_alone"] == doc["private"]
    assert doc["public"]["buses"] >= 1


def test_assign(tmp_path, grid):
    (tmp_path / "r.csv").write_text("passenger_id,destination_node\n0,5\n1,10\n2,15\n")
    out = tmp_path / "a.json"
    assert main(["assign", "--net", str(grid), "--origin", "0", "--requests", str(tmp_path / "r.csv"),
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["partitions_visited"] == 5
    assert sorted(p for r in doc["routes"] for p in r["block"]) == [0, 1, 2]


def test_ingest_then_scenarios(tmp_path, grid):
    (tmp_path / "t.csv").write_text("pickup_x_km,pickup_y_km,dropoff_x_km,dropoff_y_km\n"
                                    "0,0,1.6,1.6\n0,0,2.4,0\n0,0,50,50\n")
    assert main(["ingest-trips", "--trips", str(tmp_path / "t.csv"), "--net", str(grid),
                 "--out", str(tmp_path / "req.csv")]) == 0
    assert main(["gen-scenarios", "--net", str(grid), "--requests", str(tmp_path / "req.csv"),
                 "--origin", "0", "--out", str(tmp_path / "s.csv"),
                 "--assignments-out", str(tmp_path / "a.json")]) == 0
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 3


def test_explain_agents(tmp_path, worked_scenario, capsys):
    save_scenarios([worked_scenario], tmp_path / "s.csv")
    assert main(["explain", "--agent", "pbe", "--scenario", str(tmp_path / "s.csv")]) == 0
    line = json.loads(capsys.readouterr().out)
    assert line["texts"][0] == "A private ride would have cost $13.83 and would have taken 12 minutes."
    assert main(["explain", "--agent", "random", "--seed", "4", "--scenario", str(tmp_path / "s.csv")]) == 0
    first = capsys.readouterr().out
    main(["explain", "--agent", "random", "--seed", "4", "--scenario", str(tmp_path / "s.csv")])
    assert capsys.readouterr().out == first


def test_axis_without_model(tmp_path, worked_scenario, capsys):
    save_scenarios([worked_scenario], tmp_path / "s.csv")
    assert main(["explain", "--agent", "axis", "--scenario", str(tmp_path / "s.csv")]) == 6
    assert "error[configuration]" in capsys.readouterr().err
    assert main(["agents-compare", "--scenarios", str(tmp_path / "s.csv"),
                 "--out", str(tmp_path / "r.csv")]) == 6


def test_game_commands(tmp_path, capsys):
    (tmp_path / "p.csv").write_text("value,prob\n1,0.25\n2,0.25\n3,0.25\n4,0.25\n")
    prior = str(tmp_path / "p.csv")
    assert main(["game", "pbe", "--prior", prior]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verified"] and doc["on_quiet"] == 1.0 and doc["reveal_prob"] == [0.0, 1.0, 1.0, 1.0]
    assert main(["game", "unravel", "--prior", prior]) == 0
    assert json.loads(capsys.readouterr().out)["sequence"] == [2.5, 1.5, 1.0]
    assert main(["game", "simulate", "--prior", prior, "--reveal-above", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["on_quiet"] == 2.5


@pytest.mark.parametrize("argv,code", [
    (["gen-graph", "--rows", "3", "--cols", "3"], 2),                        # missing --out
    (["gen-graph", "--rows", "1", "--cols", "3", "--out", "x"], 2),          # input error
    (["game", "pbe", "--prior", "/nonexistent.csv"], 3),                     # parse error
    (["synth-labels", "--scenarios", "SCEN", "--noise", "0.5", "--out", "OUT"], 2),
    (["synth-labels", "--scenarios", "SCEN", "--subset", "0", "1", "2", "3", "4", "4",
      "--out", "OUT"], 6),
])
def test_exit_codes(tmp_path, argv, code, capsys):
    save_scenarios([Scenario(0, TripQuote(1, 2, 3, 4, 5, 6))], tmp_path / "s.csv")
    paths = {"SCEN": tmp_path / "s.csv", "OUT": tmp_path / "o.csv", "x": tmp_path / "x"}
    argv = [str(paths.get(a, a)) for a in argv]
    assert main(argv) == code
    assert "error[" in capsys.readouterr().err
