import itertools

import numpy as np
import pytest
from scipy import linalg

from dispersao import tensor as tensor_module
from dispersao.exceptions import (
    AxisIndexError,
    DecompositionError,
    InvalidPermutationError,
    NonFiniteError,
    ShapeMismatchError,
)
from dispersao.tensor import (
    Tensor,
    contract,
    identity,
    permute,
    qr_split,
    svd_truncate,
)


def random_tensor(rng, shape):
    return Tensor(rng.normal(size=shape) + 1j * rng.normal(size=shape))


def nested_loop_contract(a, axes_a, b, axes_b):
    free_a = [i for i in range(a.ndim) if i not in axes_a]
    free_b = [i for i in range(b.ndim) if i not in axes_b]
    inner = [a.shape[i] for i in axes_a]
    out_shape = [a.shape[i] for i in free_a] + [b.shape[i] for i in free_b]
    out = np.zeros(out_shape, dtype=complex)
    for idx_out in itertools.product(*(range(n) for n in out_shape)):
        ia_free = idx_out[: len(free_a)]
        ib_free = idx_out[len(free_a) :]
        total = 0j
        for idx_in in itertools.product(*(range(n) for n in inner)):
            ia = [0] * a.ndim
            ib = [0] * b.ndim
            for pos, val in zip(free_a, ia_free):
                ia[pos] = val
            for pos, val in zip(free_b, ib_free):
                ib[pos] = val
            for pa, pb, val in zip(axes_a, axes_b, idx_in):
                ia[pa] = val
                ib[pb] = val
            total += a[tuple(ia)] * b[tuple(ib)]
        out[idx_out] = total
    return out


# ===== TENSOR =====


def test_tensor_rejects_non_finite():
    with pytest.raises(NonFiniteError):
        Tensor(np.array([1.0, np.nan]))


def test_tensor_rejects_zero_dimension():
    with pytest.raises(ShapeMismatchError):
        Tensor(np.zeros((2, 0)))


def test_from_flat_checks_length():
    t = Tensor.from_flat((2, 3), range(6))
    assert t.shape == (2, 3)
    assert t.data[1, 0] == 3
    with pytest.raises(ShapeMismatchError):
        Tensor.from_flat((2, 3), range(5))


def test_tensor_is_read_only():
    t = identity(2)
    with pytest.raises(ValueError):
        t.data[0, 0] = 5


# ===== CONTRACT =====


def test_contract_identity_vector():
    v = Tensor(np.array([1.0 + 2j, -3.0]))
    out = contract(identity(2), [1], v, [0])
    np.testing.assert_allclose(out.data, v.data)


def test_contract_matrix_product(rng):
    a = random_tensor(rng, (2, 3))
    b = random_tensor(rng, (3, 4))
    out = contract(a, [1], b, [0])
    np.testing.assert_allclose(out.data, a.data @ b.data, atol=1e-12)


def test_contract_three_index_example(rng):
    a = random_tensor(rng, (3, 4, 2))
    b = random_tensor(rng, (4, 2, 5))
    out = contract(a, [1, 2], b, [0, 1])
    oracle = nested_loop_contract(a.data, [1, 2], b.data, [0, 1])
    assert out.shape == (3, 5)
    np.testing.assert_allclose(out.data, oracle, atol=1e-12)


@pytest.mark.parametrize('seed', range(200))
def test_contract_matches_nested_loops(seed):
    rng = np.random.default_rng(seed)
    n_c = int(rng.integers(0, 3))
    free_a = int(rng.integers(0 if n_c else 1, 3))
    free_b = int(rng.integers(0 if n_c else 1, 3))
    dims_c = rng.integers(1, 6, size=n_c).tolist()
    dims_a = rng.integers(1, 6, size=free_a).tolist()
    dims_b = rng.integers(1, 6, size=free_b).tolist()

    labels_a = [('c', i) for i in range(n_c)]
    labels_a += [('a', i) for i in range(free_a)]
    labels_b = [('c', i) for i in range(n_c)]
    labels_b += [('b', i) for i in range(free_b)]
    labels_a = [labels_a[i] for i in rng.permutation(len(labels_a))]
    labels_b = [labels_b[i] for i in rng.permutation(len(labels_b))]
    sizes = {('c', i): d for i, d in enumerate(dims_c)}
    sizes |= {('a', i): d for i, d in enumerate(dims_a)}
    sizes |= {('b', i): d for i, d in enumerate(dims_b)}

    a = random_tensor(rng, [sizes[lab] for lab in labels_a])
    b = random_tensor(rng, [sizes[lab] for lab in labels_b])
    axes_a = [labels_a.index(('c', i)) for i in range(n_c)]
    axes_b = [labels_b.index(('c', i)) for i in range(n_c)]

    out = contract(a, axes_a, b, axes_b)
    oracle = nested_loop_contract(a.data, axes_a, b.data, axes_b)
    np.testing.assert_allclose(out.data, oracle, atol=1e-12, rtol=1e-12)


@pytest.mark.parametrize('seed', range(5))
def test_contract_is_bilinear(seed):
    rng = np.random.default_rng(seed)
    a1 = random_tensor(rng, (3, 4, 2))
    a2 = random_tensor(rng, (3, 4, 2))
    b = random_tensor(rng, (2, 4))
    alpha, beta = 0.7 - 0.2j, -1.3
    lhs = contract(alpha * a1 + beta * a2, [1, 2], b, [1, 0])
    rhs = alpha * contract(a1, [1, 2], b, [1, 0]) + beta * contract(
        a2, [1, 2], b, [1, 0]
    )
    assert np.linalg.norm((lhs - rhs).data) <= 1e-12 * lhs.norm()


def test_contract_shape_mismatch_names_pair():
    a = Tensor(np.ones((2, 3)))
    b = Tensor(np.ones((4, 2)))
    with pytest.raises(ShapeMismatchError, match=r'\(1, 0\)'):
        contract(a, [1], b, [0])


def test_contract_axis_out_of_range():
    a = Tensor(np.ones((2, 3)))
    with pytest.raises(AxisIndexError):
        contract(a, [2], a, [0])
    with pytest.raises(AxisIndexError):
        contract(a, [0, 0], a, [0, 1])


def test_contract_axis_lists_must_match():
    a = Tensor(np.ones((2, 2)))
    with pytest.raises(ShapeMismatchError):
        contract(a, [0, 1], a, [0])


# ===== PERMUTE =====


def test_permute_identity_and_inverse(rng):
    a = random_tensor(rng, (2, 3, 4))
    np.testing.assert_array_equal(permute(a, [0, 1, 2]).data, a.data)
    p = [2, 0, 1]
    back = permute(permute(a, p), np.argsort(p))
    np.testing.assert_array_equal(back.data, a.data)


def test_permute_index_map(rng):
    a = random_tensor(rng, (2, 3, 4))
    out = permute(a, [2, 0, 1])
    assert out.shape == (4, 2, 3)
    for i, j, k in [(0, 0, 0), (3, 1, 2), (2, 0, 1), (1, 1, 0)]:
        assert out.data[i, j, k] == a.data[j, k, i]


def test_permute_rejects_invalid_order(rng):
    a = random_tensor(rng, (2, 3))
    with pytest.raises(InvalidPermutationError):
        permute(a, [0, 0])
    with pytest.raises(InvalidPermutationError):
        permute(a, [0, 1, 2])


# ===== SVD =====


def test_svd_rank_one_is_exact(rng):
    u = rng.normal(size=5)
    v = rng.normal(size=4)
    m = Tensor(np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v)))
    result = svd_truncate(m, 1)
    assert result.kept == 1
    assert result.singular_values[0] == pytest.approx(1.0, abs=1e-12)
    assert result.truncation_error == pytest.approx(0.0, abs=1e-12)


def test_svd_identity():
    result = svd_truncate(identity(4), 4)
    np.testing.assert_allclose(result.singular_values, np.ones(4))
    assert result.truncation_error == 0.0


def test_svd_truncation_error_matches_full_decomposition(rng):
    m = random_tensor(rng, (6, 6))
    result = svd_truncate(m, 3)
    s = linalg.svd(m.data, compute_uv=False)
    expected = np.sqrt(np.sum(s[3:] ** 2) / np.sum(s**2))
    assert result.kept == 3
    assert result.truncation_error == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize('seed', range(20))
def test_svd_reconstruction_error_equals_reported(seed):
    rng = np.random.default_rng(seed)
    rows, cols = rng.integers(2, 8, size=2)
    m = random_tensor(rng, (rows, cols))
    d_max = int(rng.integers(1, min(rows, cols) + 1))
    result = svd_truncate(m, d_max)
    approx = (
        result.left.data
        @ np.diag(result.singular_values)
        @ result.right.data
    )
    rel = np.linalg.norm(m.data - approx) / np.linalg.norm(m.data)
    assert rel == pytest.approx(result.truncation_error, abs=1e-10)
    assert np.all(np.diff(result.singular_values) <= 0)
    assert np.all(result.singular_values >= 0)


def test_svd_lossless_and_monotone(rng):
    m = random_tensor(rng, (5, 7))
    errors = [svd_truncate(m, d).truncation_error for d in range(1, 8)]
    assert all(b <= a + 1e-15 for a, b in itertools.pairwise(errors))
    assert errors[-1] < 1e-12
    assert svd_truncate(m, 10).kept == 5


def test_svd_rel_cutoff_drops_small_values():
    m = Tensor(np.diag([1.0, 1e-3, 1e-14]))
    assert svd_truncate(m, 3, rel_cutoff=1e-12).kept == 2
    assert svd_truncate(m, 3).kept == 3


def test_svd_errors(rng):
    with pytest.raises(ShapeMismatchError):
        svd_truncate(random_tensor(rng, (2, 2, 2)), 2)
    with pytest.raises(ValueError):
        svd_truncate(identity(2), 0)


def test_svd_non_convergence_is_decomposition_error(monkeypatch):
    def fail(*args, **kwargs):
        raise linalg.LinAlgError('SVD did not converge')

    monkeypatch.setattr(tensor_module.linalg, 'svd', fail)
    with pytest.raises(DecompositionError):
        svd_truncate(identity(3), 2)


def test_qr_split_reconstructs(rng):
    m = random_tensor(rng, (6, 3))
    q, r = qr_split(m)
    assert q.shape == (6, 3)
    assert r.shape == (3, 3)
    np.testing.assert_allclose(q.data @ r.data, m.data, atol=1e-12)
    np.testing.assert_allclose(
        q.data.conj().T @ q.data, np.eye(3), atol=1e-12
    )
