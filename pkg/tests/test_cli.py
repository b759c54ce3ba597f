import json

import numpy as np
import pytest

import ghostproj as gp
from calibration import VIOLATION_EPS, VIOLATION_SEED, VIOLATION_TRIALS
from ghostproj import io
from ghostproj.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def test_mask_gen_gi(tmp_path, capsys):
    out = tmp_path / "m.gfb"
    rc = run("mask", "gen", "--mode", "gi", "--height", 16, "--width", 16,
             "--count", 100, "--q", 0.1, "--seed", 7, "--out", out)
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["n_masks"] == 100
    assert 0.07 <= summary["one_density"] <= 0.13
    masks = io.read_mask(out)
    assert masks.packed.shape[0] == 100


def test_mask_gen_byte_identical(tmp_path):
    a, b = tmp_path / "a.gfb", tmp_path / "b.gfb"
    for out in (a, b):
        assert run("mask", "gen", "--mode", "gc", "--height", 8, "--mask-width", 64,
                   "--q", 0.1, "--seed", 3, "--out", out) == 0
    assert a.read_bytes() == b.read_bytes()


def test_mask_gen_rejects_bad_q(tmp_path):
    rc = run("mask", "gen", "--mode", "gi", "--height", 4, "--width", 4,
             "--count", 2, "--q", 1.0, "--seed", 0, "--out", tmp_path / "x.gfb")
    assert rc == 2


def test_features_extract_roundtrip(tmp_path):
    img = np.ones((6, 6))
    img_path, mask_path = tmp_path / "i.gfm", tmp_path / "m.gfb"
    io.write_matrix(img_path, img)
    assert run("mask", "gen", "--mode", "gi", "--height", 6, "--width", 6,
               "--count", 20, "--q", 0.3, "--seed", 1, "--out", mask_path) == 0
    out = tmp_path / "f.gfv"
    assert run("features", "extract", "--image", img_path, "--mask", mask_path,
               "--out", out) == 0
    vals, mode = io.read_features(out)
    masks = io.read_mask(mask_path)
    assert mode is gp.Mode.GI
    assert np.array_equal(vals, masks.flat_planes().sum(axis=1).astype(float))
    # read-back equals in-memory values bit-exactly
    fv = gp.gi_features(img, masks)
    assert np.array_equal(vals, fv.raw)


def test_features_extract_gc_length_and_centered(tmp_path):
    img = np.random.default_rng(0).random((4, 5))
    img_path, mask_path = tmp_path / "i.gfm", tmp_path / "m.gfb"
    io.write_matrix(img_path, img)
    assert run("mask", "gen", "--mode", "gc", "--height", 4, "--mask-width", 12,
               "--q", 0.2, "--seed", 2, "--out", mask_path) == 0
    out = tmp_path / "f.csv"
    assert run("features", "extract", "--image", img_path, "--mask", mask_path,
               "--out", out, "--centered") == 0
    vals = io.read_features_csv(out)
    assert vals.size == 12 + 5 - 1
    assert abs(vals.sum()) < 1e-9 * max(np.abs(vals).sum(), 1.0)


def test_features_extract_dimension_mismatch(tmp_path):
    img_path, mask_path = tmp_path / "i.gfm", tmp_path / "m.gfb"
    io.write_matrix(img_path, np.ones((3, 3)))
    assert run("mask", "gen", "--mode", "gi", "--height", 4, "--width", 4,
               "--count", 2, "--q", 0.5, "--seed", 0, "--out", mask_path) == 0
    assert run("features", "extract", "--image", img_path, "--mask", mask_path,
               "--out", tmp_path / "f.gfv") == 2


def test_verify_jl_default_objects_pass(tmp_path):
    report = tmp_path / "r.json"
    rc = run("verify", "jl", "--mode", "gi", "--height", 8, "--width", 8,
             "--m", 512, "--q", 0.1, "--trials", 400, "--seed", 5,
             "--report", report, "--csv", tmp_path / "r.csv")
    assert rc == 0
    payload = json.loads(report.read_text())
    assert payload["all_bounds_hold"] is True
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == \
        "eps,delta,violation_rate,vacuous"


def test_verify_jl_reproduces_report_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for report in (a, b):
        assert run("verify", "jl", "--mode", "gc", "--height", 4, "--width", 4,
                   "--m", 64, "--q", 0.2, "--trials", 100, "--seed", 8,
                   "--report", report) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_jl_identical_objects_exit_2(tmp_path):
    img = tmp_path / "x.gfm"
    io.write_matrix(img, np.random.default_rng(1).random((4, 4)))
    rc = run("verify", "jl", "--mode", "gi", "--height", 4, "--width", 4,
             "--m", 32, "--q", 0.2, "--trials", 10, "--seed", 0,
             "--image-x", img, "--image-y", img)
    assert rc == 2


def test_verify_jl_bound_violation_exit_3(tmp_path):
    # pinned small-sample run whose empirical rate exceeds its delta
    rc = run("verify", "jl", "--mode", "gi", "--height", 8, "--width", 8,
             "--m", 512, "--q", 0.1, "--eps", VIOLATION_EPS,
             "--trials", VIOLATION_TRIALS, "--seed", VIOLATION_SEED,
             "--report", tmp_path / "v.json")
    assert rc == 3


def test_reconstruct_command(tmp_path, capsys):
    disk = gp.synth_cells(1, "disk", 16, 16, seed=0, radius=5.0,
                          radius_jitter=0.0, intensity_jitter=0.0, noise=0.0)[0]
    img = tmp_path / "disk.gfm"
    io.write_matrix(img, disk)
    out = tmp_path / "recon.gfm"
    rc = run("reconstruct", "--image", img, "--count", 5120, "--q", 0.5,
             "--seed", 1, "--out", out)
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["pearson_r"] >= 0.8
    recon = io.read_matrix(out)
    assert recon.shape == (16, 16)


def test_bounds_eval_command(tmp_path, capsys):
    diff = tmp_path / "d.gfm"
    io.write_matrix(diff, np.array([[1.0], [1.0]]))
    rc = run("bounds", "eval", "--image", diff, "--mode", "gi", "--q", 0.5,
             "--m", 100, "--eps", 0.5, "--report", tmp_path / "b.json")
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["gamma"] == 4.0
    assert payload["lambda"] == 2.0
    assert payload["delta_table"][0]["delta"] == pytest.approx(
        2 * np.exp(-25 / 3.0004), rel=1e-12)


def test_bounds_eval_zero_difference_exit_2(tmp_path):
    diff = tmp_path / "d.gfm"
    io.write_matrix(diff, np.zeros((3, 3)))
    assert run("bounds", "eval", "--image", diff, "--mode", "gi",
               "--q", 0.5, "--m", 100) == 2


def test_kernel_gap_command(tmp_path):
    report = tmp_path / "k.json"
    rc = run("kernel", "gap", "--height", 6, "--width", 6, "--m", 32, "--m", 128,
             "--q", 0.2, "--pairs", 8, "--mask-seeds", 4, "--seed", 9,
             "--report", report, "--csv", tmp_path / "k.csv")
    assert rc == 0
    payload = json.loads(report.read_text())
    gaps = {row["n_masks"]: row["median_gap"] for row in payload["gap_rows"]}
    assert gaps[32] >= gaps[128]


def test_classify_demo_command(tmp_path, capsys):
    rc = run("classify", "demo", "--height", 12, "--width", 12, "--m", 256,
             "--q", 0.1, "--train", 24, "--test", 24, "--seed", 4,
             "--report", tmp_path / "c.json")
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload["accuracies"]) == {"image_kernel", "ghost_kernel"}


def test_missing_file_exit_1(tmp_path):
    assert run("features", "extract", "--image", tmp_path / "absent.gfm",
               "--mask", tmp_path / "absent.gfb", "--out", tmp_path / "f.gfv") == 1


def test_bad_subcommand_exit_2():
    with pytest.raises(SystemExit) as exc:
        run("mask", "gen", "--mode", "nope")
    assert exc.value.code == 2
