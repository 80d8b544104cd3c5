import subprocess
import sys

import numpy as np
import pytest

from kselect import KRange, confidence_table, load_affinity, read_labels, read_matrix, write_matrix
from kselect.cli import main
from kselect.evalbench import parse_report


@pytest.fixture
def exact3(tmp_path):
    path = tmp_path / "m.mat"
    assert main(["synth", "--k", "3", "--per-cluster", "5", "--within", "1", "1", "--cross", "0", "0",
                 "--out", str(path), "--labels-out", str(tmp_path / "m.lbl")]) == 0
    return path


def test_select_exact_blocks(exact3, capsys):
    capsys.readouterr()
    assert main(["select", "--matrix", str(exact3), "--kmin", "2", "--kmax", "5", "--strategy", "average", "--seed", "42"]) == 0
    assert capsys.readouterr().out == "3\n"


def test_select_kmax_too_large(exact3, capsys):
    assert main(["select", "--matrix", str(exact3), "--kmax", "15"]) == 1
    assert "k_max must be < n" in capsys.readouterr().err


def test_bad_flags_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["select"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["select", "--matrix", "x", "--strategy", "bogus"])
    assert info.value.code == 1


def test_malformed_file_names_file_and_line(tmp_path, capsys):
    p = tmp_path / "bad.mat"
    p.write_text("3\n1 0 0\n0 1\n0 0 1\n")
    assert main(["select", "--matrix", str(p)]) == 1
    assert f"{p}:3:" in capsys.readouterr().err


def test_dimension_mismatch_exit_1(exact3, tmp_path):
    other = tmp_path / "o.mat"
    write_matrix(other, np.eye(4))
    assert main(["fuse", "--matrix", str(exact3), "--matrix", str(other), "--out", str(tmp_path / "f.mat")]) == 1


def test_numerical_failure_exit_2(exact3, monkeypatch, capsys):
    from kselect import matrix, selection

    def no_sweeps(m):
        return matrix.sym_eigensolve(m, max_sweeps=0)

    monkeypatch.setattr(selection, "sym_eigensolve", no_sweeps)
    assert main(["select", "--matrix", str(exact3)]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_cluster_writes_labels(exact3, tmp_path, capsys):
    out = tmp_path / "labels.txt"
    assert main(["cluster", "--matrix", str(exact3), "--k", "3", "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip().endswith("labels.txt")
    assert read_labels(out).tolist() == read_labels(tmp_path / "m.lbl").tolist()
    auto = tmp_path / "auto.txt"
    assert main(["cluster", "--matrix", str(exact3), "--out", str(auto)]) == 0
    assert auto.read_text() == out.read_text()


def test_fuse_and_synth_round_trip(tmp_path):
    a, b = tmp_path / "a.mat", tmp_path / "b.mat"
    main(["synth", "--k", "2", "--per-cluster", "4", "--seed", "1", "--out", str(a)])
    main(["synth", "--k", "2", "--per-cluster", "4", "--seed", "2", "--out", str(b)])
    fused = tmp_path / "f.mat"
    assert main(["fuse", "--matrix", str(a), "--matrix", str(b), "--out", str(fused)]) == 0
    values = read_matrix(fused)
    assert np.diag(values).tolist() == [1.0] * 8
    for p in (a, b, fused):
        m = load_affinity(p)
        write_matrix(tmp_path / "again.mat", m)
        np.testing.assert_allclose(read_matrix(tmp_path / "again.mat"), read_matrix(p), rtol=0, atol=1e-15)
    mean = tmp_path / "mean.mat"
    main(["fuse", "--matrix", str(a), "--matrix", str(b), "--fusion", "mean", "--out", str(mean)])
    np.testing.assert_allclose(read_matrix(mean), (read_matrix(a) + read_matrix(b)) / 2, atol=1e-15)


def test_indices_match_library(tmp_path, capsys):
    p = tmp_path / "n.mat"
    main(["synth", "--k", "3", "--per-cluster", "6", "--seed", "4", "--out", str(p)])
    capsys.readouterr()
    assert main(["indices", "--matrix", str(p), "--seed", "9"]) == 0
    lines = capsys.readouterr().out.splitlines()
    table = confidence_table(load_affinity(p), KRange(2, 5), 9)
    header = lines[0].split(",")
    for i, line in enumerate(lines[1:]):
        row = dict(zip(header, map(float, line.split(","))))
        assert row["raw_silhouette"] == table.raw["silhouette"][i]
        assert row["conf_ch"] == table.confidence["ch"][i]
        assert row["average"] == table.average[i]
    dump = tmp_path / "dump.csv"
    main(["select", "--matrix", str(p), "--seed", "9", "--dump-confidences", str(dump)])
    assert dump.read_text().splitlines() == lines


def test_identical_invocations_identical_output(tmp_path):
    p = tmp_path / "n.mat"
    main(["synth", "--k", "4", "--per-cluster", "5", "--seed", "3", "--out", str(p)])
    outs = []
    for name in ("x.txt", "y.txt"):
        main(["cluster", "--matrix", str(p), "--k", "4", "--seed", "5", "--out", str(tmp_path / name)])
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_evaluate_voting_on_exact_manifest(tmp_path, capsys):
    rows = ["id,gt_k,labels,affinities"]
    for k in (2, 3, 4, 5):
        main(["synth", "--k", str(k), "--per-cluster", "4", "--within", "1", "1", "--cross", "0", "0",
              "--out", str(tmp_path / f"s{k}.mat"), "--labels-out", str(tmp_path / f"s{k}.lbl")])
        rows.append(f"s{k},{k},s{k}.lbl,s{k}.mat")
    (tmp_path / "man.csv").write_text("\n".join(rows) + "\n")
    capsys.readouterr()
    report = tmp_path / "report.csv"
    assert main(["evaluate", "--manifest", str(tmp_path / "man.csv"), "--strategy", "voting", "--seed", "7",
                 "--out", str(report)]) == 0
    assert capsys.readouterr().out.strip() == str(report)
    _, agg, by_k = parse_report(report.read_text())
    assert agg["mse"] == "0.000000" and agg["accuracy"] == "100.000000"
    assert sorted(by_k) == [2, 3, 4, 5]


def test_module_entry_point(exact3):
    out = subprocess.run([sys.executable, "-m", "kselect", "select", "--matrix", str(exact3)],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout == "3\n"
