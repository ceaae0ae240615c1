"""Benchmarks and demos driven by the command-line interface.

Random tensors come from numpy's PCG64 generator.  Trial ``t`` of a run with
seed ``s`` uses the stream ``PCG64(SeedSequence([s, t]))`` and numpy's
ziggurat normal sampler, so results do not depend on how trials are
scheduled across threads.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import tensorfile
from .algebra import TubalMatrix, TubalTensor
from .hotsvd import (HotSvdFactors, check_all_orthogonality, check_ordering, hotsvd,
                     seq_tr_hotsvd, tr_hotsvd, truncation_bound)
from .transform import TransformSpec

HILBERT_NORMS = (1.7166, 0.1002)
HILBERT_CORE_111 = (1.4734, 0.8780)
HILBERT_CORE_222 = (0.0102, 0.0107)
HILBERT_TOL = 1e-3
CSV_HEADER = "config,algo,trunc,err,bound,time_ms"
ALGORITHMS = {"tr": tr_hotsvd, "seq-tr": seq_tr_hotsvd}


def hilbert_tensor(size: int = 2, order: int = 4) -> np.ndarray:
    """``A(i_1, ..., i_m) = 1 / (i_1 + ... + i_m - m + 1)`` with 1-based indices."""
    idx = np.indices((size,) * order).sum(axis=0)  # 0-based sum
    return 1.0 / (idx + 1.0)


def hilbert_demo() -> dict:
    """Hot-SVD of the 2x2x2x2 Hilbert tensor read as a 2x2x2 tubal tensor with p = 2."""
    A = TubalTensor.from_array(hilbert_tensor())
    F = hotsvd(A)
    norms = [np.asarray(s) for s in F.slice_norms_per_mode]
    core = F.core.entries
    ok_norms = all(np.allclose(s, HILBERT_NORMS, atol=HILBERT_TOL) for s in norms)
    ok_core = (np.allclose(np.abs(core[0, 0, 0]), HILBERT_CORE_111, atol=HILBERT_TOL)
               and np.allclose(np.abs(core[1, 1, 1]), HILBERT_CORE_222, atol=HILBERT_TOL))
    return {
        "factors": F,
        "slice_norms": norms,
        "core": core,
        "orthogonality": check_all_orthogonality(F),
        "ordering": check_ordering(F),
        "norms_ok": ok_norms,
        "core_ok": ok_core,
    }


def format_hilbert(result: dict) -> str:
    lines = ["Hilbert tensor 2x2x2x2 as a 2x2x2 tubal tensor (p = 2)"]
    for n, s in enumerate(result["slice_norms"]):
        lines.append(f"mode {n + 1} core slice norms: " + " ".join(f"{v:.4f}" for v in s))
    core = result["core"]
    for idx in np.ndindex(core.shape[:-1]):
        label = ",".join(str(i + 1) for i in idx)
        lines.append(f"S({label}) = [" + ", ".join(f"{v:+.4f}" for v in core[idx]) + "]")
    lines.append(f"all-orthogonality residual: {result['orthogonality']:.3e}")
    lines.append(f"ordering: {'ok' if result['ordering'] else 'VIOLATED'}")
    verdict = "PASS" if result["norms_ok"] and result["core_ok"] else "FAIL"
    lines.append(f"reference values: {verdict}")
    return "\n".join(lines)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(trial)])))


def random_low_rank(dims, rank: int, beta: float, rng: np.random.Generator):
    """Return ``(A, A_sharp)`` with ``A = A_sharp + beta * E / ||E||`` and ``||A_sharp|| = 1``.

    ``A_sharp`` is a sum of ``rank`` outer products of standard Gaussian
    vectors over every axis, the tubal one included.
    """
    dims = tuple(int(d) for d in dims)
    vecs = [rng.standard_normal((d, rank)) for d in dims]
    letters = "abcdefghijklmnopqrstuvwxyz"[:len(dims)]
    sharp = np.einsum(",".join(f"{c}z" for c in letters) + "->" + letters, *vecs)
    sharp /= np.linalg.norm(sharp)
    noise = rng.standard_normal(dims)
    return sharp + beta * noise / np.linalg.norm(noise), sharp


@dataclass
class BenchRow:
    config: str
    algo: str
    trunc: str
    err: float
    bound: float
    time_ms: float
    fit: float = 0.0

    def csv(self) -> str:
        return f"{self.config},{self.algo},{self.trunc},{self.err:.6g},{self.bound:.6g},{self.time_ms:.6g}"


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    def mean(self, algo: str, attr: str = "err") -> float:
        vals = [getattr(r, attr) for r in self.rows if r.algo == algo]
        return float(np.mean(vals)) if vals else float("nan")

    def csv(self) -> str:
        return "\n".join([CSV_HEADER] + [r.csv() for r in self.rows]) + "\n"

    def summary(self) -> str:
        algos = list(dict.fromkeys(r.algo for r in self.rows))
        return "\n".join(f"{a}: mean err {self.mean(a):.5f}, mean time {self.mean(a, 'time_ms'):.3f} ms"
                         for a in algos)


def _ranks(trunc, dims):
    n_tubal = len(dims) - 1
    if isinstance(trunc, (int, np.integer)):
        return (int(trunc),) * n_tubal
    trunc = tuple(int(t) for t in trunc)
    if len(trunc) != n_tubal:
        raise ValueError(f"need 1 or {n_tubal} truncation sizes, got {len(trunc)}")
    return trunc


def _one_trial(dims, rank, beta, ranks, seed, trial, algos):
    A_arr, sharp = random_low_rank(dims, rank, beta, trial_rng(seed, trial))
    A = TubalTensor.from_array(A_arr)
    bound = truncation_bound(A, ranks)
    a_norm = np.linalg.norm(A_arr)
    out = []
    for name in algos:
        t0 = time.perf_counter()
        F = ALGORITHMS[name](A, ranks)
        elapsed = time.perf_counter() - t0
        approx = F.reconstruct().entries
        fit = np.linalg.norm(A_arr - approx)
        if fit > bound + 1e-10 * a_norm:
            raise AssertionError(f"{name}: approximation error {fit:.3e} exceeds bound {bound:.3e}")
        err = np.linalg.norm(sharp - approx) / np.linalg.norm(sharp)
        out.append((name, err, bound / a_norm, 1e3 * elapsed, fit / a_norm))
    return out


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("TUBAL_THREADS", "1")))
    except ValueError:
        return 1


def bench_random(dims, rank: int, beta: float, trunc, trials: int, seed: int,
                 algos=("tr", "seq-tr"), threads: int | None = None) -> BenchReport:
    """Recover low-rank tensors from noisy observations, ``trials`` times.

    ``err`` is ``||A_sharp - A_hat|| / ||A_sharp||``; ``bound`` is the
    truncation bound divided by ``||A||``, which caps the relative fit
    ``||A - A_hat|| / ||A||`` (checked on every row).
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2 or min(dims) < 1:
        raise ValueError(f"need at least one mode plus the tubal axis, got {dims}")
    if rank < 1 or trials < 1 or beta < 0:
        raise ValueError("rank and trials must be positive and beta nonnegative")
    ranks = _ranks(trunc, dims)
    for r, d in zip(ranks, dims):
        if not 1 <= r <= d:
            raise ValueError(f"truncation {r} outside [1, {d}]")
    threads = thread_count() if threads is None else max(1, threads)
    job = lambda t: _one_trial(dims, rank, beta, ranks, seed, t, algos)  # noqa: E731
    if threads == 1:
        results = [job(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, range(trials)))
    config = "x".join(map(str, dims))
    label = "x".join(map(str, ranks))
    report = BenchReport()
    for res in results:
        for name, err, bound, ms, fit in res:
            report.rows.append(BenchRow(config, name, label, err, bound, ms, fit))
    return report


def time_algorithms(dims, trunc, reps: int, seed: int = 0) -> list:
    """Wall times ``(tr_seconds, seq_seconds)`` for ``reps`` random tensors."""
    dims = tuple(dims)
    ranks = _ranks(trunc, dims)
    out = []
    for rep in range(reps):
        A = TubalTensor.from_array(trial_rng(seed, rep).standard_normal(dims))
        A.hat  # transform once, outside the timed region
        times = []
        for fn in (tr_hotsvd, seq_tr_hotsvd):
            t0 = time.perf_counter()
            fn(A, ranks)
            times.append(time.perf_counter() - t0)
        out.append(tuple(times))
    return out


def compress(in_path, ranks, algo: str, out_dir, reference=None) -> dict:
    """Truncated Hot-SVD of a tensor file, written as core and factor files plus a manifest."""
    data = tensorfile.read(in_path)
    A = TubalTensor.from_array(data)
    fn = {"tr": tr_hotsvd, "seq": seq_tr_hotsvd}[algo]
    F = fn(A, ranks)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tensorfile.write(out / "core.tten", F.core.entries)
    for n, U in enumerate(F.factors):
        tensorfile.write(out / f"factor_{n}.tten", U.entries)
    a_norm = np.linalg.norm(data)
    diff = np.linalg.norm(data - F.reconstruct().entries)
    scale = a_norm if a_norm > 0 else 1.0
    manifest = {
        "version": 1,
        "algorithm": F.algorithm,
        "shape": list(data.shape),
        "ranks": list(F.ranks),
        "transform": "dft",
        "order": A.order,
        "input": str(Path(in_path).resolve()),
        "err": diff / scale,
        "bound": truncation_bound(A, F.ranks) / scale,
    }
    if reference is not None:
        ref = tensorfile.read(reference)
        manifest["reference"] = str(Path(reference).resolve())
        manifest["reference_err"] = float(np.linalg.norm(ref - F.reconstruct().entries) / np.linalg.norm(ref))
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return manifest


def load_factors(factor_dir) -> HotSvdFactors:
    d = Path(factor_dir)
    manifest = json.loads((d / "manifest.json").read_text())
    p = manifest["shape"][-1]
    spec = TransformSpec.dft(p)
    core = tensorfile.read(d / "core.tten")
    facs = tuple(TubalMatrix(tensorfile.read(d / f"factor_{n}.tten"), spec)
                 for n in range(manifest["order"]))
    return HotSvdFactors(TubalTensor.from_array(core, spec), facs, (), truncation=tuple(manifest["ranks"]),
                         algorithm=manifest["algorithm"])


def decompress(factor_dir, out_path, original=None) -> dict:
    """Rebuild the tensor from a factor directory; report the error against ``original``."""
    F = load_factors(factor_dir)
    manifest = json.loads((Path(factor_dir) / "manifest.json").read_text())
    approx = F.reconstruct().entries
    tensorfile.write(out_path, approx)
    src = original if original is not None else manifest["input"]
    result = {"manifest_err": manifest["err"], "bound": manifest["bound"], "err": None}
    if src is not None and Path(src).exists():
        data = tensorfile.read(src)
        scale = np.linalg.norm(data) or 1.0
        result["err"] = float(np.linalg.norm(data - approx) / scale)
    return result
