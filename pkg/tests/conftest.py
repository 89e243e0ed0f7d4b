import numpy as np
import pytest

from fraccos.families import opnorm


def random_instance(rng, d, radius=4.0, b_norm=0.5):
    """Symmetric negative semidefinite A with spectral radius ``radius`` and ``||B|| = b_norm``."""
    X = rng.standard_normal((d, d))
    A = -(X @ X.T)
    A *= radius / np.max(np.abs(np.linalg.eigvalsh(A)))
    B = rng.standard_normal((d, d))
    B *= b_norm / opnorm(B)
    return A, B


def ml_eig_oracle(kind, alpha, M, t):
    """Family of a diagonalisable ``M`` through its eigenvalues and mpmath."""
    import mpmath

    mpmath.mp.dps = 40
    w, V = np.linalg.eig(M)
    Vinv = np.linalg.inv(V)
    b = {"cosine": 1, "sine": 2, "riemann_liouville": alpha}[kind]
    pref = {"cosine": 1.0, "sine": t, "riemann_liouville": t ** (alpha - 1)}[kind]

    def E(z):
        z = mpmath.mpc(z)
        acc, k = mpmath.mpf(0), 0
        while True:
            term = z ** k / mpmath.gamma(mpmath.mpf(alpha) * k + b)
            acc += term
            if k > 10 and abs(term) < mpmath.mpf(10) ** -30:
                return complex(acc)
            k += 1

    vals = np.array([E(t ** alpha * mu) for mu in w])
    return np.real(V @ np.diag(vals) @ Vinv) * pref


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance results collected by tests/test_acceptance.py
ACCEPTANCE: dict = {}
FINDINGS: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE and not FINDINGS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        tr.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
    if FINDINGS:
        tr.section("informational findings")
        for line in FINDINGS:
            tr.write_line(line)
