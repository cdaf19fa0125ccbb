import numpy as np
import pytest
from gmpy2 import mpq

from oracles import Mx, Z4, records
from veronese import kernels
from veronese.exactnum import GeometricCeil, LacunarySpec, RealHandle, powers_enclosure

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba unavailable")

Z = RealHandle.lacunary(LacunarySpec(2, 1, GeometricCeil(1, 4)))
UNIT = 2**64


def _arrays(k):
    return kernels.fixed_point_arrays(powers_enclosure(Z, k, 4))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_mx_bounds_enclose_exact_values(k):
    A, W = _arrays(k)
    lo, hi = kernels.mx_bounds_block(A, W, 1, 400, backend="numpy")
    for x in range(1, 400):
        exact = Mx(Z4, k, x) * UNIT
        assert int(lo[x - 1]) <= exact <= int(hi[x - 1])


@needs_numba
@pytest.mark.parametrize("k", [1, 2, 3])
def test_backends_agree_on_bounds(k):
    A, W = _arrays(k)
    a = kernels.mx_bounds_block(A, W, 1, 5000, backend="numba")
    b = kernels.mx_bounds_block(A, W, 1, 5000, backend="numpy")
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@needs_numba
def test_backends_agree_on_record_candidates():
    A, W = _arrays(2)
    a = kernels.record_candidates(A, W, 1, 1 << 16, backend="numba", block=1 << 12)
    b = kernels.record_candidates(A, W, 1, 1 << 16, backend="numpy", block=1 << 12)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("backend", ["numpy", pytest.param("numba", marks=needs_numba)])
def test_record_candidates_cover_true_records(backend):
    A, W = _arrays(2)
    cands = set(kernels.record_candidates(A, W, 1, 3000, backend=backend, block=700).tolist())
    assert set(records(Z4, 2, 3000)) <= cands


def test_record_candidates_independent_of_workers():
    A, W = _arrays(2)
    a = kernels.record_candidates(A, W, 1, 1 << 15, workers=1, block=1 << 11)
    b = kernels.record_candidates(A, W, 1, 1 << 15, workers=3, block=1 << 11)
    assert np.array_equal(a, b)


def test_iter_blocks_ordered_for_any_worker_count():
    A, W = _arrays(2)
    one = [(s, lo.tolist()) for s, lo, _ in kernels.iter_mx_bounds(A, W, 1, 5000, workers=1, block=999)]
    many = [(s, lo.tolist()) for s, lo, _ in kernels.iter_mx_bounds(A, W, 1, 5000, workers=4, block=999)]
    assert one == many


def test_fixed_point_of_a_point_interval():
    from veronese.exactnum import Interval

    a, w = kernels.fixed_point(Interval.point(mpq(5, 4)))
    assert a == UNIT // 4 and w == 0


def test_large_x_rejected():
    A, W = _arrays(1)
    with pytest.raises(ValueError):
        kernels.mx_bounds_block(A, W, 1 << 40, (1 << 40) + 2)
