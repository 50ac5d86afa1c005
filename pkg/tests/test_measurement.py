import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from csid import (InvalidArgument, SeededRng, apply_measurement, build_measurement_operator, convolve_full,
                  downsample, gen_random_filter, gen_sparse_system, measurement_count_guidance)
from csid.measurement import measurement_rows

from conftest import direct_convolution


def test_sparse_system_reference_size(rng):
    s = gen_sparse_system(rng, 500, 40)
    assert s.h.size == 500 and s.N == 500
    assert np.count_nonzero(s.h) == 40


def test_sparse_system_empty_and_dense(rng):
    assert np.array_equal(gen_sparse_system(rng, 8, 0).h, np.zeros(8))
    assert np.count_nonzero(gen_sparse_system(rng, 8, 8).h) == 8


def test_sparse_system_k_too_large(rng):
    with pytest.raises(InvalidArgument):
        gen_sparse_system(rng, 5, 6)


def test_support_positions_uniform():
    N, k, draws = 20, 3, 10_000
    counts = np.zeros(N)
    rng = SeededRng(42)
    for _ in range(draws):
        counts[gen_sparse_system(rng, N, k).support] += 1
    assert chisquare(counts).pvalue > 0.01


def test_random_filter(rng):
    assert gen_random_filter(rng, 80).L == 80
    assert gen_random_filter(rng, 1).f.shape == (1,)
    assert np.array_equal(gen_random_filter(SeededRng(3), 10).f, gen_random_filter(SeededRng(3), 10).f)
    with pytest.raises(InvalidArgument):
        gen_random_filter(rng, 0)


def test_random_filter_unit_energy_scaling():
    f = gen_random_filter(SeededRng(1), 100_000, variance=1 / 100_000).f
    assert abs(f @ f - 1.0) < 0.02


@pytest.mark.parametrize("phase, M", [(1, 289), (0, 290)])
def test_reference_dimensions(rng, phase, M):
    op = build_measurement_operator(gen_random_filter(rng, 80), 500, 2, phase)
    assert op.M == M and op.shape == (M, 500)


def test_delta_filter_identity():
    op = build_measurement_operator([1.0], 3, 1, 0)
    assert np.array_equal(op.matrix, np.eye(3))
    s = np.array([1.0, -2.0, 3.0])
    assert np.array_equal(apply_measurement(op, s), s)


def test_small_operator_by_hand():
    op = build_measurement_operator([1.0, 1.0], 3, 2, 0)
    # conv([1,2,3],[1,1]) = [1,3,5,3] -> decimate -> [1,5]
    assert np.array_equal(apply_measurement(op, [1.0, 2.0, 3.0]), [1.0, 5.0])
    assert np.array_equal(apply_measurement(op, np.zeros(3)), np.zeros(op.M))


def test_entries_match_definition(rng):
    f = gen_random_filter(rng, 5).f
    op = build_measurement_operator(f, 7, 3, 2)
    for i in range(op.M):
        for j in range(7):
            t = 3 * i + 2 - j
            assert op.matrix[i, j] == (f[t] if 0 <= t < 5 else 0.0)


def test_phase_out_of_range(rng):
    with pytest.raises(InvalidArgument):
        build_measurement_operator(gen_random_filter(rng, 4), 10, 2, 2)


def test_dimension_mismatch(rng):
    op = build_measurement_operator(gen_random_filter(rng, 4), 10, 2, 0)
    with pytest.raises(InvalidArgument):
        apply_measurement(op, np.ones(9))


def test_matrix_equals_streaming_200_tuples():
    r = np.random.default_rng(2024)
    for _ in range(200):
        N, L, q = int(r.integers(1, 65)), int(r.integers(1, 12)), int(r.integers(1, 5))
        phase = int(r.integers(0, min(q, N + L - 1)))
        f, s = r.standard_normal(L), r.standard_normal(N)
        op = build_measurement_operator(f, N, q, phase)
        ref = downsample(direct_convolution(s, f), q, phase)
        y = apply_measurement(op, s)
        assert np.linalg.norm(y - ref) <= 1e-10 * max(np.linalg.norm(ref), 1e-300)
        assert np.allclose(op.matvec(s), y, rtol=0, atol=1e-10 * max(1, np.abs(ref).max()))
        z = r.standard_normal(op.M)
        assert np.allclose(op.rmatvec(z), op.matrix.T @ z, rtol=0, atol=1e-10 * max(1, np.abs(z).sum()))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 40), st.integers(1, 15), st.integers(1, 5), st.data())
def test_row_count_law(N, L, q, data):
    phase = data.draw(st.integers(0, min(q, N + L - 1) - 1))
    op = build_measurement_operator(np.ones(L), N, q, phase)
    assert op.M == math.ceil((N + L - 1 - phase) / q) == measurement_rows(N, L, q, phase)
    full = np.array([convolve_full(np.eye(N)[j], np.ones(L)) for j in range(N)]).T
    assert np.array_equal(op.matrix, full[phase::q])


@pytest.mark.parametrize("k, N, c, expected", [(40, 500, 1.0, 249), (5, 100, 2.0, 47)])
def test_measurement_guidance(k, N, c, expected):
    assert measurement_count_guidance(k, N, c) == expected
    assert expected == math.ceil(c * k * math.log(N))


def test_measurement_guidance_small():
    assert measurement_count_guidance(1, 3) >= 1
    assert measurement_count_guidance(1, 1) == 1


def test_empty_operator_rejected():
    with pytest.raises(InvalidArgument):
        build_measurement_operator([1.0], 1, 2, 1)
