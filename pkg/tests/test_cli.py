import json
import warnings

import numpy as np
import pytest

from fixedrank import read_labels, read_matrix
from fixedrank.cli import dispatch


def run(args):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return dispatch(args)


def gen_args(out, k=3, p=20, dh=30, dl=3, seed=0, extra=()):
    return [
        "gen", "--k", str(k), "--p", str(p), "--dh", str(dh), "--dl", str(dl),
        "--seed", str(seed), "--out", str(out), *extra,
    ]


def test_gen_writes_data_truth_and_manifest(tmp_path):
    out = tmp_path / "data"
    assert run(gen_args(out)) == 0
    X = read_matrix(str(out / "X.frrm"))
    assert X.shape == (30, 60)
    truth = read_labels(str(out / "truth.labels"))
    np.testing.assert_array_equal(truth, np.repeat([0, 1, 2], 20))
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "gen"
    assert manifest["seed"] == 0
    assert manifest["parameters"]["k"] == 3
    assert any(p.endswith("X.frrm") for p in manifest["outputs"])


def test_gen_with_outliers_and_shuffle(tmp_path):
    out = tmp_path / "dirty"
    code = run(gen_args(out, extra=("--outliers", "4", "--magnitude", "9", "--shuffle")))
    assert code == 0
    X = read_matrix(str(out / "X.frrm"))
    assert X.shape == (30, 64)
    mask = read_labels(str(out / "mask.labels"))
    assert mask.sum() == 4
    perm = read_labels(str(out / "permutation.labels"))
    assert sorted(perm) == list(range(64))


def test_gen_outliers_require_magnitude(tmp_path):
    assert run(gen_args(tmp_path / "x", extra=("--outliers", "2"))) == 1


def test_gen_rank_matches_advertised_shape(tmp_path):
    out = tmp_path / "fig"
    assert run(gen_args(out, k=10, p=10, dh=100, dl=50, seed=7)) == 0
    X = read_matrix(str(out / "X.frrm"))
    assert X.shape == (100, 100)
    assert np.linalg.matrix_rank(X) == 100


def test_solve_outputs_and_replay(tmp_path):
    data = tmp_path / "data"
    run(gen_args(data))
    for out in ("s1", "s2"):
        code = run([
            "solve", "--input", str(data / "X.frrm"), "--m", "3",
            "--trace", "--out", str(tmp_path / out),
        ])
        assert code == 0
    for name in ("Z.frrm", "L.frrm", "R.frrm", "E.frrm", "trace.csv"):
        a = (tmp_path / "s1" / name).read_bytes()
        b = (tmp_path / "s2" / name).read_bytes()
        assert a == b, name
    manifest = json.loads((tmp_path / "s1" / "manifest.json").read_text())
    assert manifest["parameters"]["converged"] is True
    Z = read_matrix(str(tmp_path / "s1" / "Z.frrm"))
    assert Z.shape == (60, 60)


def test_solve_strict_nonconvergence_exit_code(tmp_path):
    data = tmp_path / "data"
    run(gen_args(data))
    code = run([
        "solve", "--input", str(data / "X.frrm"), "--m", "3",
        "--max-iter", "2", "--strict", "--out", str(tmp_path / "s"),
    ])
    assert code == 3
    # without --strict the same run warns but exits clean
    code = run([
        "solve", "--input", str(data / "X.frrm"), "--m", "3",
        "--max-iter", "2", "--out", str(tmp_path / "s2"),
    ])
    assert code == 0
    manifest = json.loads((tmp_path / "s2" / "manifest.json").read_text())
    assert manifest["parameters"]["converged"] is False


def test_cluster_eval_pipeline_reaches_perfect_accuracy(tmp_path, capsys):
    data = tmp_path / "data"
    run(gen_args(data, k=10, p=10, dh=100, dl=50, seed=7))
    assert run([
        "cluster", "--input", str(data / "X.frrm"), "--k", "10",
        "--affinity", "lr", "--out", str(tmp_path / "c"),
    ]) == 0
    assert run([
        "eval", "--pred", str(tmp_path / "c" / "labels.labels"),
        "--truth", str(data / "truth.labels"),
    ]) == 0
    lines = capsys.readouterr().out.splitlines()
    pairs = dict(line.split("=") for line in lines if "=" in line and " " not in line)
    assert float(pairs["accuracy"]) >= 0.95
    assert float(pairs["error"]) == pytest.approx(1.0 - float(pairs["accuracy"]))


def test_cluster_affinity_choices_differ_only_in_matrix(tmp_path):
    data = tmp_path / "data"
    run(gen_args(data, seed=3))
    for aff in ("z", "lr"):
        assert run([
            "cluster", "--input", str(data / "X.frrm"), "--k", "3",
            "--affinity", aff, "--out", str(tmp_path / aff),
        ]) == 0
        labels = read_labels(str(tmp_path / aff / "labels.labels"))
        assert labels.shape == (60,)


def test_cluster_from_solution_dir(tmp_path):
    data = tmp_path / "data"
    run(gen_args(data))
    run(["solve", "--input", str(data / "X.frrm"), "--m", "3", "--out", str(tmp_path / "s")])
    assert run([
        "cluster", "--solution", str(tmp_path / "s"), "--k", "3",
        "--out", str(tmp_path / "c"),
    ]) == 0
    labels = read_labels(str(tmp_path / "c" / "labels.labels"))
    assert labels.shape == (60,)


def test_cluster_robust_path(tmp_path):
    data = tmp_path / "data"
    run(gen_args(data, seed=5))
    assert run([
        "cluster", "--input", str(data / "X.frrm"), "--k", "3", "--robust",
        "--out", str(tmp_path / "c"),
    ]) == 0
    manifest = json.loads((tmp_path / "c" / "manifest.json").read_text())
    assert manifest["parameters"]["m"] == 3  # defaulted to k
    assert manifest["parameters"]["converged"] is True


def test_eval_perfect_agreement(tmp_path, capsys):
    data = tmp_path / "data"
    run(gen_args(data))
    assert run([
        "eval", "--pred", str(data / "truth.labels"),
        "--truth", str(data / "truth.labels"), "--out", str(tmp_path / "e"),
    ]) == 0
    out = capsys.readouterr().out
    assert "accuracy=1.0" in out
    assert "error=0.0" in out
    scores = json.loads((tmp_path / "e" / "eval.json").read_text())
    assert scores == {"accuracy": 1.0, "error": 0.0}


def test_extract_transform_detect_pipeline(tmp_path):
    data = tmp_path / "data"
    run(gen_args(data, k=3, p=15, dh=25, dl=3, extra=("--outliers", "5", "--magnitude", "40")))
    assert run([
        "extract", "--train", str(data / "X.frrm"), "--strategy", "tfrr1",
        "--m", "9", "--mu", "0.002", "--out", str(tmp_path / "ex"),
    ]) == 0
    assert run([
        "transform", "--extractor", str(tmp_path / "ex"),
        "--input", str(data / "X.frrm"), "--out", str(tmp_path / "t"),
    ]) == 0
    feats = read_matrix(str(tmp_path / "t" / "features.frrm"))
    assert feats.shape == (25, 50)

    energies_dir = tmp_path / "det"
    ex_E = read_matrix(str(tmp_path / "ex" / "E.frrm"))
    gamma = float(np.sort(np.linalg.norm(ex_E, axis=0))[-5:].min() * 0.5)
    assert run([
        "detect", "--extractor", str(tmp_path / "ex"),
        "--gamma", str(gamma), "--out", str(energies_dir),
    ]) == 0
    mask = read_labels(str(energies_dir / "mask.labels"))
    truth_mask = read_labels(str(data / "mask.labels"))
    np.testing.assert_array_equal(mask, truth_mask)
    energies = read_matrix(str(energies_dir / "energies.csv"))
    assert energies.shape == (1, 50)
    png = (energies_dir / "energies.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"


def test_closed_form_modes(tmp_path):
    data = tmp_path / "data"
    run(gen_args(data, seed=2))
    x_path = str(data / "X.frrm")
    assert run(["closed-form", "--input", x_path, "--mode", "sim", "--out", str(tmp_path / "sim")]) == 0
    Z = read_matrix(str(tmp_path / "sim" / "Z.frrm"))
    np.testing.assert_allclose(Z @ Z, Z, atol=1e-9)  # projector

    assert run(["closed-form", "--input", x_path, "--mode", "frr", "--m", "3", "--out", str(tmp_path / "f")]) == 0
    L = read_matrix(str(tmp_path / "f" / "L.frrm"))
    assert L.shape == (60, 3)
    manifest = json.loads((tmp_path / "f" / "manifest.json").read_text())
    assert manifest["parameters"]["rank_x"] == 9
    assert manifest["parameters"]["objective"] == pytest.approx(6.0, abs=1e-9)

    assert run(["closed-form", "--input", x_path, "--mode", "pca", "--m", "4", "--out", str(tmp_path / "p")]) == 0
    P = read_matrix(str(tmp_path / "p" / "P.frrm"))
    assert P.shape == (30, 4)

    # pca and frr need --m
    assert run(["closed-form", "--input", x_path, "--mode", "pca", "--out", str(tmp_path / "q")]) == 1


def test_sweep_csv_and_plot(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"k": 3, "d_h": 30, "d_l": 3, "p_values": [8, 10], "seeds": 2}))
    out = tmp_path / "sw"
    assert run(["sweep", "--spec", str(spec), "--out", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "p,seed,accuracy_z,accuracy_lr"
    assert len(lines) == 1 + 2 * 2
    cells = [line.split(",") for line in lines[1:]]
    assert [(int(c[0]), int(c[1])) for c in cells] == [(8, 0), (8, 1), (10, 0), (10, 1)]
    for c in cells:
        assert 0.0 <= float(c[2]) <= 1.0 and 0.0 <= float(c[3]) <= 1.0
    assert (out / "sweep.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["parameters"]["resolved_spec"]["p_values"] == [8, 10]


def test_exit_codes():
    assert run(["solve", "--input", "/definitely/missing.frrm", "--m", "2", "--out", "/tmp/x"]) == 2
    assert run(["solve"]) == 1  # missing required flags
    assert run(["no-such-command"]) == 1
    assert run([]) == 1


def test_version_flag(capsys):
    assert run(["--version"]) == 0
    assert capsys.readouterr().out.strip() == "0.1.0"
