"""Acceptance criteria, each run at its stated tolerance.

Every test records one ``[AC-k] PASS|FAIL`` line; the lines are printed in
the terminal summary (and to stdout when this file is run directly).
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LOG, circular_conv, rand_matrix, rand_tensor, summation_tproduct
from tubal import (TubalScalar, check_all_orthogonality, check_ordering, error_bound,
                   error_decomposition, hotsvd, kron_all, multi_mode_product, scalar_tproduct,
                   seq_tr_hotsvd, smallt_transpose, tproduct, tr_hotsvd, truncate_tsvd, tsvd,
                   tubal_kron, unfold, is_unitary)
from tubal.bench import bench_random, hilbert_demo, time_algorithms
from tubal.cli import main


def record(tag, ok, detail):
    line = f"[{tag}] {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LOG.append(line)
    print(line)
    assert ok, line


def _rel(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(np.linalg.norm(b), 1e-300)


def test_ac1_hilbert_regression(capsys):
    t0 = time.perf_counter()
    code = main(["hilbert-demo"])
    res = hilbert_demo()
    elapsed = time.perf_counter() - t0
    core = res["core"]
    norm_dev = max(np.max(np.abs(s - [1.7166, 0.1002])) for s in res["slice_norms"])
    dev111 = np.max(np.abs(np.abs(core[0, 0, 0]) - [1.4734, 0.8780]))
    dev222 = np.max(np.abs(np.abs(core[1, 1, 1]) - [0.0102, 0.0107]))
    ok = code == 0 and max(norm_dev, dev111, dev222) <= 1e-3 and elapsed < 1.0
    record("AC-1", ok, f"slice-norm dev {norm_dev:.1e}, S(1,1,1) dev {dev111:.1e}, "
                       f"S(2,2,2) dev {dev222:.1e}, {elapsed:.2f}s")


def _bench_means(tmp_path, dims, trunc):
    out = tmp_path / f"{dims}.csv"
    assert main(["bench-random", "--dims", dims, "--rank", "5", "--beta", "0.1", "--trunc", str(trunc),
                 "--trials", "50", "--seed", "2024", "--out", str(out)]) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    return {algo: np.mean([float(r[3]) for r in rows if r[1] == algo]) for algo in ("tr", "seq-tr")}


def test_ac2_random_recovery(tmp_path, capsys):
    t0 = time.perf_counter()
    small = _bench_means(tmp_path, "10,10,10,10", 10)
    large = _bench_means(tmp_path, "15,15,15,10", 10)
    elapsed = time.perf_counter() - t0
    ok_small = all(0.036 <= small[a] <= 0.056 for a in small)
    ok_large = abs(large["tr"] - 0.02913) <= 0.01 and abs(large["seq-tr"] - 0.02911) <= 0.01
    record("AC-2", ok_small and ok_large and elapsed < 30,
           f"[10 10 10 10] tr {small['tr']:.5f} seq {small['seq-tr']:.5f} (want [0.036, 0.056]); "
           f"[15 15 15 10] tr {large['tr']:.5f} seq {large['seq-tr']:.5f} (want 0.0291 +- 0.01); "
           f"{elapsed:.1f}s")


def test_ac3_error_bound_law():
    rng = np.random.default_rng(3)
    violations, worst = 0, -np.inf
    for _ in range(100):
        N = int(rng.integers(3, 6))
        dims = tuple(int(d) for d in rng.integers(1, 13, size=N))
        p = int(rng.integers(1, 9))
        ranks = tuple(int(rng.integers(1, d + 1)) for d in dims)
        A = rand_tensor(rng, dims, p)
        for algo in (tr_hotsvd, seq_tr_hotsvd):
            F = algo(A, ranks)
            err = np.linalg.norm(A.entries - F.reconstruct().entries)
            slack = err - error_bound(F) - 1e-10 * A.norm()
            worst = max(worst, slack / A.norm())
            violations += slack > 0
    record("AC-3", violations == 0, f"{violations} violations over 200 decompositions "
                                   f"(worst relative slack {worst:.1e})")


def _structural_instance(rng):
    N = int(rng.integers(2, 5))
    dims = tuple(int(d) for d in rng.integers(1, 6, size=N))
    p = int(rng.integers(1, 7))
    return rand_tensor(rng, dims, p, complex_=bool(rng.integers(0, 2)))


def test_ac4_structural_suite():
    rng = np.random.default_rng(4)
    worst = dict.fromkeys("abcdefghi", 0.0)
    ordering_ok = True
    for _ in range(200):
        A = _structural_instance(rng)
        nrm = A.norm()
        F = hotsvd(A)
        worst["a"] = max(worst["a"], _rel(F.reconstruct().entries, A.entries))
        worst["b"] = max(worst["b"], abs(F.core.norm() - nrm) / nrm)
        worst["c"] = max(worst["c"], check_all_orthogonality(F) / nrm ** 2)
        ordering_ok &= check_ordering(F)
        # (e) unfolding identity with the computed factors
        for n in range(A.order):
            others = [F.factors[m] for m in reversed(range(A.order)) if m != n]
            rhs = unfold(F.core, n)
            if others:
                rhs = tproduct(rhs, smallt_transpose(kron_all(others)))
            rhs = tproduct(F.factors[n], rhs)
            worst["e"] = max(worst["e"], _rel(unfold(A, n).entries, rhs.entries))
        # (f) telescoping decomposition
        ranks = [int(rng.integers(1, d + 1)) for d in A.shape]
        G = tr_hotsvd(A, ranks)
        err2 = np.linalg.norm(A.entries - G.reconstruct().entries) ** 2
        terms = error_decomposition(A, G.factors)
        worst["f"] = max(worst["f"], abs(np.sum(terms ** 2) - err2) / nrm ** 2)
        # (g) transpose rules
        i, j, k = (int(v) for v in rng.integers(1, 5, size=3))
        X, Y = rand_matrix(rng, i, j, A.p, True), rand_matrix(rng, j, k, A.p, True)
        XY = tproduct(X, Y)
        worst["g"] = max(worst["g"], _rel(XY.H.entries, tproduct(Y.H, X.H).entries),
                         _rel(XY.t.entries, tproduct(Y.t, X.t).entries))
        # (h) Kronecker properties (i)-(v)
        B, C = rand_matrix(rng, 2, 3, A.p), rand_matrix(rng, 3, 2, A.p)
        D, E = rand_matrix(rng, 3, 2, A.p), rand_matrix(rng, 2, 3, A.p)
        W = rand_matrix(rng, 2, 2, A.p)
        U1, U2 = tsvd(rand_matrix(rng, 3, 3, A.p)).U, tsvd(rand_matrix(rng, 2, 2, A.p)).U
        kr = [
            _rel(tubal_kron(B, C).t.entries, tubal_kron(B.t, C.t).entries),
            _rel(tubal_kron(B, C).H.entries, tubal_kron(B.H, C.H).entries),
            _rel(tproduct(tubal_kron(B, C), tubal_kron(D, E)).entries,
                 tubal_kron(tproduct(B, D), tproduct(C, E)).entries),
            _rel(tubal_kron(tubal_kron(B, C), W).entries, tubal_kron(B, tubal_kron(C, W)).entries),
            0.0 if is_unitary(tubal_kron(U1, U2), tol=1e-10) else 1.0,
        ]
        worst["h"] = max(worst["h"], *kr)
        # (i) order-2 reduction
        M = rand_matrix(rng, int(rng.integers(1, 6)), int(rng.integers(1, 6)), A.p)
        k2 = min(M.shape)
        worst["i"] = max(worst["i"], np.max(np.abs(hotsvd(M).slice_norms_per_mode[0][:k2]
                                                   - tsvd(M).slice_norms)) / M.norm())
    limits = {"a": 1e-10, "b": 1e-10, "c": 1e-8, "e": 1e-10, "f": 1e-8, "g": 1e-10, "h": 1e-10, "i": 1e-10}
    ok = ordering_ok and all(worst[key] <= lim for key, lim in limits.items())
    detail = ", ".join(f"({key}) {worst[key]:.1e}" for key in limits)
    record("AC-4", ok, f"200 instances: {detail}, (d) ordering {'ok' if ordering_ok else 'violated'}")


def test_ac5_oracle_equivalence():
    rng = np.random.default_rng(5)
    conv = 0.0
    for _ in range(1000):
        p = int(rng.integers(1, 17))
        a, b = rng.standard_normal(p), rng.standard_normal(p)
        got = scalar_tproduct(TubalScalar.from_array(a), TubalScalar.from_array(b)).entries
        ref = circular_conv(a, b)
        conv = max(conv, np.max(np.abs(got - ref)) / max(np.max(np.abs(ref)), 1e-300))
    summ = 0.0
    for _ in range(100):
        i, k, j, p = (int(v) for v in rng.integers(1, 5, size=4))
        A, B = rand_matrix(rng, i, k, p), rand_matrix(rng, k, j, p)
        summ = max(summ, _rel(tproduct(A, B).entries, summation_tproduct(A.entries, B.entries)))
    svd = 0.0
    for _ in range(100):
        A = rand_matrix(rng, *(int(v) for v in rng.integers(1, 7, size=3)))
        hat = np.fft.fft(A.entries, axis=-1)
        ref = np.stack([np.linalg.svd(hat[:, :, s], compute_uv=False) for s in range(A.p)], axis=-1)
        svd = max(svd, np.max(np.abs(tsvd(A).spectrum - ref)))
    ok = conv <= 1e-12 and summ <= 1e-10 and svd <= 1e-10
    record("AC-5", ok, f"convolution {conv:.1e}, summation {summ:.1e}, slice SVD {svd:.1e}")


def test_ac6_complexity_trend():
    t0 = time.perf_counter()
    times = time_algorithms((20, 20, 20, 20, 10), 10, reps=10, seed=6)
    elapsed = time.perf_counter() - t0
    wins = sum(seq <= tr for tr, seq in times)
    ratio = np.median([tr / seq for tr, seq in times])
    record("AC-6", wins >= 9 and elapsed < 60,
           f"seq-tr faster in {wins}/10 runs (median speedup {ratio:.2f}x), {elapsed:.1f}s")


def test_ac7_eckart_young_probe():
    rng = np.random.default_rng(7)
    violations = 0
    for _ in range(20):
        i, j, p = (int(v) for v in rng.integers(2, 7, size=3))
        k = int(rng.integers(1, min(i, j) + 1))
        A = rand_matrix(rng, i, j, p)
        best = np.linalg.norm(A.entries - truncate_tsvd(tsvd(A), k).entries)
        for _ in range(200):
            X = tproduct(rand_matrix(rng, i, k, p), rand_matrix(rng, k, j, p))
            violations += np.linalg.norm(A.entries - X.entries) < best - 1e-12 * A.norm()
    record("AC-7", violations == 0, f"{violations} random rank-k products beat the truncation (20x200)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
