import subprocess
import sys

import pytest

from faircoreset import BenchConfig, load_csv, synthetic_mixture
from faircoreset.cli import main
from faircoreset.harness import write_dataset_csv


@pytest.fixture
def data(tmp_path):
    D = synthetic_mixture(n=200, seed=3)
    path = tmp_path / "data.csv"
    write_dataset_csv(D, path)
    return str(path)


def ds(path):
    return ["--input", path, "--features", "x0,x1", "--groups", "group"]


def test_build_validate_eval(tmp_path, data, capsys):
    out = str(tmp_path / "core.csv")
    assert main(["build", *ds(data), "--k", "2", "--epsilon", "0.3", "--output", out]) == 0
    assert main(["validate", *ds(data), "--coreset", out]) == 0
    assert capsys.readouterr().out.strip().endswith("ok")

    (tmp_path / "C.csv").write_text("x0,x1\n0,0\n5,5\n")
    (tmp_path / "F.csv").write_text("cluster,profile,mass\n0,0,50\n1,0,{}\n0,1,{}\n".format(
        *_split_masses(data)))
    args = ["--constraint", str(tmp_path / "F.csv"), "--centers", str(tmp_path / "C.csv")]
    assert main(["eval", "--coreset", out, *args]) == 0
    on_coreset = float(capsys.readouterr().out)
    assert main(["eval", *ds(data), *args]) == 0
    on_data = float(capsys.readouterr().out)
    assert abs(on_coreset / on_data - 1) <= 0.3


def _split_masses(path):
    sizes = load_csv(BenchConfig(path, ["x0", "x1"], ["group"])).class_sizes()
    return int(sizes[0]) - 50, int(sizes[1])


def test_eval_infeasible(tmp_path, data, capsys):
    (tmp_path / "C.csv").write_text("x0,x1\n0,0\n")
    (tmp_path / "F.csv").write_text("cluster,profile,mass\n0,0,1\n")
    code = main(["eval", *ds(data), "--constraint", str(tmp_path / "F.csv"),
                 "--centers", str(tmp_path / "C.csv")])
    assert code == 1 and capsys.readouterr().out.strip() == "inf"


def test_uniform_build(tmp_path, data):
    out = str(tmp_path / "u.csv")
    assert main(["build", *ds(data), "--method", "uniform", "--size", "20", "--output", out]) == 0
    assert main(["validate", *ds(data), "--coreset", out]) == 0
    assert main(["build", *ds(data), "--method", "uniform", "--output", out]) == 2


def test_validate_failure(tmp_path, data, capsys):
    out = tmp_path / "core.csv"
    assert main(["build", *ds(data), "--k", "2", "--output", str(out)]) == 0
    rows = out.read_text().splitlines()
    rows[1] = "999," + rows[1].split(",", 1)[1]
    out.write_text("\n".join(rows) + "\n")
    assert main(["validate", *ds(data), "--coreset", str(out)]) == 1
    assert "coreset weight" in capsys.readouterr().out


def test_bench(tmp_path, data, capsys):
    prefix = tmp_path / "rep"
    assert main(["bench", *ds(data), "--k", "2", "--epsilons", "0.2,0.4", "--trials", "2",
                 "--output", str(prefix)]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 3
    assert (tmp_path / "rep.json").exists() and (tmp_path / "rep.csv").exists()


def test_usage_errors(tmp_path, data, capsys):
    assert main(["build", "--input", data, "--features", "nope", "--output",
                 str(tmp_path / "x.csv")]) == 2
    assert "column not found: nope" in capsys.readouterr().err
    assert main(["build", "--input", str(tmp_path / "missing.csv"), "--features", "x0",
                 "--output", str(tmp_path / "x.csv")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["build"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--constraint", "f", "--centers", "c"])
    assert exc.value.code == 2


def test_module_entry_point(data):
    proc = subprocess.run([sys.executable, "-m", "faircoreset", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "validate" in proc.stdout
