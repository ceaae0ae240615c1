import json
import re
import shutil
import subprocess

import numpy as np
import pytest

from tubal import TubalTensor, multi_mode_product, tensorfile
from tubal.bench import bench_random, random_low_rank, time_algorithms, trial_rng
from tubal.cli import main
from tubal.selftest import CHECKS, run_captured


def test_hilbert_demo(capsys):
    assert main(["hilbert-demo"]) == 0
    out = capsys.readouterr().out
    assert out.count("1.7166 0.1002") == 3
    assert "S(1,1,1) = [+1.4734, +0.8780]" in out
    assert "reference values: PASS" in out


def test_bench_csv_schema_and_determinism(tmp_path, capsys):
    args = ["bench-random", "--dims", "6,6,6,4", "--rank", "3", "--beta", "0.1", "--trunc", "3",
            "--trials", "3", "--seed", "7"]
    assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.csv"), "--threads", "3"]) == 0
    a = (tmp_path / "a.csv").read_text().splitlines()
    b = (tmp_path / "b.csv").read_text().splitlines()
    assert a[0] == "config,algo,trunc,err,bound,time_ms"
    assert len(a) == 1 + 2 * 3
    strip = [",".join(r.split(",")[:5]) for r in a]
    assert strip == [",".join(r.split(",")[:5]) for r in b]
    row = a[1].split(",")
    assert row[:3] == ["6x6x6x4", "tr", "3x3x3"]
    for field in row[3:]:
        assert len(re.sub(r"e.*$", "", field).replace(".", "").replace("-", "").lstrip("0")) <= 6


def test_bench_same_means_any_thread_count():
    r1 = bench_random((5, 5, 4), 2, 0.1, 2, 4, seed=3, threads=1)
    r2 = bench_random((5, 5, 4), 2, 0.1, 2, 4, seed=3, threads=4)
    assert [r.err for r in r1.rows] == [r.err for r in r2.rows]
    assert r1.mean("tr") == r2.mean("tr")


def test_bench_noiseless_exact():
    rep = bench_random((6, 6, 6, 4), 3, 0.0, 4, 3, seed=1)
    assert max(r.err for r in rep.rows) <= 1e-8


def test_bench_fit_within_bound():
    rep = bench_random((6, 5, 4, 3), 4, 0.2, (2, 3, 2), 4, seed=5)
    for r in rep.rows:
        assert r.fit <= r.bound + 1e-10


def test_random_model_normalization():
    A, sharp = random_low_rank((4, 5, 3), 2, 0.1, trial_rng(0, 0))
    assert np.linalg.norm(sharp) == pytest.approx(1.0)
    assert np.linalg.norm(A - sharp) == pytest.approx(0.1)


def test_bench_requires_seed_and_valid_config(capsys):
    with pytest.raises(SystemExit):
        main(["bench-random", "--dims", "4,4,3", "--trunc", "2"])
    assert main(["bench-random", "--dims", "4,4,3", "--trunc", "9", "--seed", "1", "--trials", "1"]) == 2
    with pytest.raises(SystemExit):
        main(["bench-random", "--dims", "4,a,3", "--trunc", "2", "--seed", "1"])


def test_recovery_error_with_core_size_five():
    # with the core size equal to the planted rank the mean error settles near 0.046
    rep = bench_random((10, 10, 10, 10), 5, 0.1, 5, 50, seed=0)
    assert rep.mean("tr") == pytest.approx(0.04616, abs=0.005)
    assert rep.mean("seq-tr") == pytest.approx(0.04595, abs=0.005)


def test_timing_helper():
    times = time_algorithms((6, 6, 6, 3), 2, reps=2)
    assert len(times) == 2 and all(t > 0 for pair in times for t in pair)


@pytest.fixture
def tensor_file(tmp_path, rng):
    path = tmp_path / "in.tten"
    tensorfile.write(path, rng.standard_normal((5, 6, 4, 3)))
    return path


def _compress(src, out, trunc, algo="seq", extra=()):
    return main(["compress", str(src), "--trunc", trunc, "--algo", algo, "--out", str(out), *extra])


@pytest.mark.parametrize("algo", ["tr", "seq"])
def test_compress_full_is_lossless(tmp_path, tensor_file, algo, capsys):
    assert _compress(tensor_file, tmp_path / "f", "5,6,4", algo) == 0
    assert main(["decompress", str(tmp_path / "f"), "--out", str(tmp_path / "o.tten")]) == 0
    X, Y = tensorfile.read(tensor_file), tensorfile.read(tmp_path / "o.tten")
    assert np.linalg.norm(X - Y) <= 1e-10 * np.linalg.norm(X)


def test_compress_low_rank_exact(tmp_path, rng, capsys):
    core = TubalTensor.from_array(rng.standard_normal((2, 3, 2, 4)))
    facs = [TubalTensor.from_array(rng.standard_normal((d, r, 4))) for d, r in ((6, 2), (5, 3), (4, 2))]
    from tubal import TubalMatrix
    X = multi_mode_product(core, [TubalMatrix(f.entries, f.transform) for f in facs]).entries
    tensorfile.write(tmp_path / "lr.tten", X)
    assert _compress(tmp_path / "lr.tten", tmp_path / "f", "2,3,2") == 0
    assert json.loads((tmp_path / "f" / "manifest.json").read_text())["err"] <= 1e-8


@pytest.mark.parametrize("algo", ["tr", "seq"])
def test_manifest_err_and_decompress_agree(tmp_path, tensor_file, algo, capsys):
    assert _compress(tensor_file, tmp_path / "f", "2,3,2", algo) == 0
    m = json.loads((tmp_path / "f" / "manifest.json").read_text())
    assert m["err"] <= m["bound"]
    assert m["ranks"] == [2, 3, 2]
    for name in ["core.tten", "factor_0.tten", "factor_1.tten", "factor_2.tten"]:
        assert (tmp_path / "f" / name).exists()
    assert main(["decompress", str(tmp_path / "f"), "--out", str(tmp_path / "o.tten"),
                 "--original", str(tensor_file)]) == 0
    out = capsys.readouterr().out
    err = float(re.search(r"relative error ([0-9.e+-]+) \(manifest", out).group(1))
    assert abs(err - m["err"]) <= 1e-12 + 1e-6 * m["err"]
    X, Y = tensorfile.read(tensor_file), tensorfile.read(tmp_path / "o.tten")
    assert abs(np.linalg.norm(X - Y) / np.linalg.norm(X) - m["err"]) <= 1e-12


def test_compress_reference_option(tmp_path, tensor_file, capsys):
    assert _compress(tensor_file, tmp_path / "f", "2,2,2", extra=["--reference", str(tensor_file)]) == 0
    m = json.loads((tmp_path / "f" / "manifest.json").read_text())
    assert m["reference_err"] == pytest.approx(m["err"], rel=1e-12)


def test_compress_errors(tmp_path, tensor_file, capsys):
    assert _compress(tensor_file, tmp_path / "f", "9,1,1") == 2
    assert _compress(tmp_path / "missing.tten", tmp_path / "f", "1,1,1") == 2
    bad = tmp_path / "bad.tten"
    bad.write_bytes(b"NOPE" + tensor_file.read_bytes()[4:])
    assert _compress(bad, tmp_path / "f", "1,1,1") == 2
    assert main(["decompress", str(tmp_path / "nowhere"), "--out", str(tmp_path / "o.tten")]) == 2


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert len(CHECKS) >= 20
    assert out.count("[PASS]") == len(CHECKS)


@pytest.mark.parametrize("name", [n for n, _ in CHECKS])
def test_selftest_fault_injection(name):
    code, out = run_captured(inject_fault=name)
    assert code == 1
    failed = [line for line in out.splitlines() if line.startswith("[FAIL]")]
    assert failed == [line for line in failed if f"] {name}:" in line] and failed


def test_selftest_unknown_fault(capsys):
    assert main(["selftest", "--inject-fault", "nonsense"]) == 2


@pytest.mark.skipif(shutil.which("tubal") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["tubal", "hilbert-demo"], capture_output=True, text=True, timeout=60)
    assert res.returncode == 0 and "1.7166" in res.stdout
