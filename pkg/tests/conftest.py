import numpy as np
import pytest

from tubal import TubalMatrix, TubalTensor


def dft_oracle(x):
    """Direct O(p^2) summation of the non-normalized DFT."""
    x = np.asarray(x, dtype=complex)
    p = x.shape[-1]
    k = np.arange(p)
    W = np.exp(-2j * np.pi * np.outer(k, k) / p)
    return x @ W.T


def circular_conv(a, b):
    p = len(a)
    return np.array([sum(a[j] * b[(k - j) % p] for j in range(p)) for k in range(p)])


def summation_tproduct(A, B):
    """Entrywise sum over k of circular convolutions of A(i,k,:) and B(k,j,:)."""
    I, K, p = A.shape
    J = B.shape[1]
    out = np.zeros((I, J, p), dtype=np.result_type(A, B))
    for i in range(I):
        for j in range(J):
            for k in range(K):
                out[i, j] += circular_conv(A[i, k], B[k, j])
    return out


def rand_matrix(rng, i, j, p, complex_=False, transform=None):
    data = rng.standard_normal((i, j, p))
    if complex_:
        data = data + 1j * rng.standard_normal((i, j, p))
    return TubalMatrix.from_array(data, transform)


def rand_tensor(rng, shape, p, complex_=False, transform=None):
    data = rng.standard_normal(tuple(shape) + (p,))
    if complex_:
        data = data + 1j * rng.standard_normal(data.shape)
    return TubalTensor.from_array(data, transform)


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LOG:
        terminalreporter.write_line(line)
