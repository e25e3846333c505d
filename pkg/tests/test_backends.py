import numpy as np
import pytest

from phase_contract._backend import get_backend, has_compiled, log_factorials, log_factorials_split

pytestmark = pytest.mark.skipif(not has_compiled(), reason="compiled kernels not built")


@pytest.fixture(scope="module")
def backends():
    return get_backend("python"), get_backend("cython")


def test_cg_float_twins(backends):
    py, cy = backends
    lf = log_factorials_split(200)
    for args in [(1, 1, 1, -1, 0, 0), (8, 2, 6, -4, 10, -2), (40, 10, 40, -10, 30, 0), (61, -3, 20, 4, 55, 1)]:
        assert py.cg_float(*args, lf) == pytest.approx(cy.cg_float(*args, lf), rel=1e-13, abs=1e-300)


@pytest.mark.parametrize("tj", [1, 7, 40, 101])
def test_wigner_d_rows_twins(backends, tj):
    py, cy = backends
    lf = log_factorials_split(2 * tj + 2)
    a, ca = py.wigner_d_rows(tj, 0.83, 0, min(tj + 1, 5), lf)
    b, cb = cy.wigner_d_rows(tj, 0.83, 0, min(tj + 1, 5), lf)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-15)
    assert np.allclose(ca, cb, rtol=1e-9)


@pytest.mark.parametrize("fn", ["term_deltas", "diagonal_cg"])
def test_sum_kernels_twins(backends, fn):
    py, cy = backends
    lf = log_factorials_split(2 * 60 + 2)
    for n in (0, 1, 3):
        a, ca = getattr(py, fn)(60, n, lf)
        b, cb = getattr(cy, fn)(60, n, lf)
        assert np.allclose(a, b, rtol=1e-11, atol=1e-15)


def test_neumaier_twins(backends, rng):
    py, cy = backends
    x = rng.normal(size=1000) * 10.0 ** rng.integers(-8, 8, 1000)
    assert np.array_equal(py.neumaier_cumsum(x), cy.neumaier_cumsum(x))


def test_table_guard(backends):
    _, cy = backends
    lf = np.ascontiguousarray(log_factorials_split(4)[:, :5])
    with pytest.raises(ValueError):
        cy.cg_float(40, 0, 40, 0, 40, 0, lf)


def test_log_factorials_accuracy():
    mpmath = pytest.importorskip("mpmath")
    lf = log_factorials(3000)
    split = log_factorials_split(3000)
    for k in (0, 1, 2, 10, 170, 1000, 3000):
        ref = float(mpmath.loggamma(k + 1))
        assert lf[k] == pytest.approx(ref, rel=2e-16, abs=1e-300)
        assert split[0, k] * 2**32 == round(split[0, k] * 2**32)


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_backend("fortran")
