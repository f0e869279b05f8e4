"""Core linear-algebra contracts: exactness, oracles, and invariants."""

import math

import numpy as np
import pytest

from distill_lab.qcore import (
    DEFAULT_TOL,
    BipartiteState,
    DimensionMismatchError,
    Dims,
    PureState,
    hermitian_eig,
    is_ppt,
    partial_trace,
    partial_transpose,
    rank_kernel_range,
    regroup_tensor_power,
    schmidt_decompose,
    schmidt_rank,
    tensor,
    tensor_power_bipartite,
)
from distill_lab.edgestate import EdgeParams, edge_state, maximally_entangled_qutrits
from distill_lab.rng import SplitMix64, derive_seed, random_unitary

D33 = Dims(3, 3)


def _random_hermitian(gen: SplitMix64, d: int) -> np.ndarray:
    g = gen.complex_matrix(d, d)
    return (g + g.conj().T) / 2


def _random_psd_state(gen: SplitMix64, dims: Dims, rank: int) -> BipartiteState:
    g = gen.complex_matrix(dims.total, rank)
    m = g @ g.conj().T
    return BipartiteState(m / np.trace(m).real, dims)


def _kron_oracle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Direct multiplication oracle for the Kronecker product."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


class TestTensor:
    def test_identity(self):
        assert np.array_equal(tensor(np.eye(2), np.eye(3)), np.eye(6))

    def test_diagonal(self):
        got = tensor(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
        assert np.allclose(got, np.diag([3.0, 4.0, 6.0, 8.0]))

    def test_mes_projector_square_against_direct_oracle(self):
        proj = maximally_entangled_qutrits().projector()
        got = tensor(proj, proj)
        expected = _kron_oracle(proj, proj)
        assert np.array_equal(got, expected)
        assert got.shape == (81, 81)
        assert abs(np.trace(got) - 1.0) < 1e-14
        s = np.linalg.svd(got, compute_uv=False)
        assert int(np.sum(s > 1e-12)) == 1


class TestPartialTranspose:
    def test_product_state_stays_psd(self):
        gen = SplitMix64(11)
        a = gen.unit_vector(3)
        b = gen.unit_vector(3)
        rho = np.outer(np.kron(a, b), np.kron(a, b).conj())
        pt = partial_transpose(rho, D33)
        expected = np.outer(np.kron(a.conj(), b), np.kron(a.conj(), b).conj())
        assert np.allclose(pt, expected, atol=1e-15)
        assert np.linalg.eigvalsh(pt)[0] > -1e-14

    def test_mes_spectrum(self):
        # the partially transposed projector is the swap over 3, spectrum +-1/3
        pt = partial_transpose(maximally_entangled_qutrits().projector(), D33)
        evals = np.sort(np.linalg.eigvalsh(pt))
        expected = np.array([-1 / 3] * 3 + [1 / 3] * 6)
        assert np.allclose(evals, expected, atol=1e-14)

    def test_involution_is_bit_exact(self):
        gen = SplitMix64(3)
        for dims in (D33, Dims(2, 3), Dims(2, 4)):
            m = gen.complex_matrix(dims.total, dims.total)
            assert np.array_equal(partial_transpose(partial_transpose(m, dims), dims), m)

    def test_preserves_trace_hermiticity_and_eigensum(self):
        gen = SplitMix64(5)
        for _ in range(10):
            h = _random_hermitian(gen, 9)
            pt = partial_transpose(h, D33)
            assert np.array_equal(pt, pt.conj().T)
            assert abs(np.trace(pt) - np.trace(h)) < 1e-14
            s_in = float(np.sum(np.linalg.eigvalsh(h)))
            s_out = float(np.sum(np.linalg.eigvalsh(pt)))
            assert abs(s_in - s_out) <= 1e-12 * max(abs(s_in), 1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            partial_transpose(np.eye(8), D33)


class TestPartialTrace:
    def test_mes_marginal(self):
        proj = maximally_entangled_qutrits().projector()
        assert np.allclose(partial_trace(proj, D33, "A"), np.eye(3) / 3, atol=1e-15)
        assert np.allclose(partial_trace(proj, D33, "B"), np.eye(3) / 3, atol=1e-15)

    def test_identity(self):
        assert np.allclose(partial_trace(np.eye(9) / 9, D33, "B"), np.eye(3) / 3)

    def test_against_index_loop_oracle(self):
        gen = SplitMix64(17)
        m = _random_hermitian(gen, 6)
        dims = Dims(2, 3)
        keep_a = np.zeros((2, 2), dtype=complex)
        keep_b = np.zeros((3, 3), dtype=complex)
        for i in range(2):
            for j in range(2):
                for n in range(3):
                    keep_a[i, j] += m[i * 3 + n, j * 3 + n]
        for k in range(3):
            for l in range(3):
                for i in range(2):
                    keep_b[k, l] += m[i * 3 + k, i * 3 + l]
        assert np.allclose(partial_trace(m, dims, "A"), keep_a, atol=1e-14)
        assert np.allclose(partial_trace(m, dims, "B"), keep_b, atol=1e-14)

    def test_tensor_factor_consistency(self):
        gen = SplitMix64(23)
        rho1 = _random_psd_state(gen, Dims(2, 2), 4).mat
        rho2 = _random_psd_state(gen, Dims(2, 2), 4).mat
        prod = tensor(rho1, rho2)
        # viewed on (A1B1) x (A2B2): tracing the first factor leaves the second
        got = partial_trace(prod, Dims(4, 4), "B")
        assert np.allclose(got, rho2 * np.trace(rho1).real, atol=1e-14)

    def test_trace_preserved(self):
        gen = SplitMix64(29)
        m = _random_hermitian(gen, 9)
        for keep in ("A", "B"):
            assert np.trace(partial_trace(m, D33, keep)) == pytest.approx(
                np.trace(m), abs=1e-13
            )


class TestHermitianEig:
    def test_sorted_diagonal(self):
        spec = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(spec.eigenvalues, [1.0, 2.0, 3.0])

    def test_rejects_non_hermitian(self):
        m = np.zeros((3, 3), dtype=complex)
        m[0, 1] = 1.0
        with pytest.raises(ValueError):
            hermitian_eig(m)

    def test_edge_pt_zero_eigenvector_is_the_mes(self):
        params = EdgeParams(1.0, math.pi / 6)
        pt = partial_transpose(edge_state(params).mat, D33)
        spec = hermitian_eig(pt)
        assert abs(spec.eigenvalues[0]) < 1e-14
        mes = maximally_entangled_qutrits().vec
        assert abs(abs(mes.conj() @ spec.eigenvectors[:, 0]) - 1.0) < 1e-12

    @pytest.mark.parametrize("dim,count", [(9, 100), (81, 100)])
    def test_reconstruction_and_orthonormality(self, dim, count):
        gen = SplitMix64(derive_seed(31, dim))
        for _ in range(count):
            h = _random_hermitian(gen, dim)
            spec = hermitian_eig(h)
            v = spec.eigenvectors
            scale = max(float(np.abs(h).max()), 1.0)
            recon = (v * spec.eigenvalues) @ v.conj().T
            assert float(np.abs(recon - h).max()) <= DEFAULT_TOL.spec_tol * scale
            assert float(np.abs(v.conj().T @ v - np.eye(dim)).max()) <= DEFAULT_TOL.spec_tol


class TestSchmidt:
    def test_product_vector_rank_one(self):
        v = np.zeros(9, dtype=complex)
        v[0] = 1.0
        assert schmidt_rank(v, D33) == 1

    def test_bell_rank_two(self):
        v = np.zeros(4, dtype=complex)
        v[0] = v[3] = 1 / math.sqrt(2)
        s, _, _ = schmidt_decompose(v, Dims(2, 2))
        assert np.allclose(s, [1 / math.sqrt(2)] * 2, atol=1e-15)
        assert schmidt_rank(v, Dims(2, 2)) == 2

    def test_mes_rank_three(self):
        mes = maximally_entangled_qutrits()
        s, _, _ = schmidt_decompose(mes.vec, D33)
        assert np.allclose(s, [1 / math.sqrt(3)] * 3, atol=1e-15)
        assert schmidt_rank(mes.vec, D33) == 3

    def test_reconstruction(self):
        gen = SplitMix64(41)
        for dims in (D33, Dims(2, 3)):
            v = gen.unit_vector(dims.total)
            s, left, right = schmidt_decompose(v, dims)
            recon = sum(
                s[k] * np.kron(left[:, k], right[:, k]) for k in range(len(s))
            )
            assert np.allclose(recon, v, atol=1e-12)

    def test_coefficients_invariant_under_local_unitaries(self):
        gen = SplitMix64(43)
        v = gen.unit_vector(9)
        s0, _, _ = schmidt_decompose(v, D33)
        for _ in range(10):
            u = random_unitary(gen, 3)
            w = random_unitary(gen, 3)
            s1, _, _ = schmidt_decompose(np.kron(u, w) @ v, D33)
            assert np.allclose(s0, s1, atol=1e-10)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            schmidt_decompose(np.zeros(9), D33)


class TestRankKernelRange:
    def test_edge_state_biranks(self):
        params = EdgeParams(1.0, math.pi / 6)
        sigma = edge_state(params)
        assert rank_kernel_range(sigma.mat)[0] == 5
        assert rank_kernel_range(partial_transpose(sigma.mat, D33))[0] == 8

    def test_zero_matrix(self):
        rank, kernel, rng_basis = rank_kernel_range(np.zeros((4, 4)))
        assert rank == 0
        assert kernel.shape == (4, 4)
        assert rng_basis.shape == (4, 0)

    def test_rank_nullity_and_orthonormality(self):
        gen = SplitMix64(47)
        for rank in (1, 3, 5):
            g = gen.complex_matrix(9, rank)
            m = g @ g.conj().T
            got, kernel, rng_basis = rank_kernel_range(m)
            assert got == rank
            assert got + kernel.shape[1] == 9
            assert np.allclose(kernel.conj().T @ kernel, np.eye(9 - rank), atol=1e-12)
            assert np.allclose(rng_basis.conj().T @ rng_basis, np.eye(rank), atol=1e-12)
            assert float(np.abs(m @ kernel).max()) < 1e-10


class TestTensorPower:
    def test_single_copy_is_identity(self):
        gen = SplitMix64(53)
        m = gen.complex_matrix(9, 9)
        out, dims = regroup_tensor_power(m, D33, 1)
        assert np.array_equal(out, m)
        assert dims == D33

    def test_commutes_with_partial_transpose(self):
        gen = SplitMix64(59)
        state = _random_psd_state(gen, D33, 5)
        powered, big = regroup_tensor_power(state.mat, D33, 2)
        pt_then_power, _ = regroup_tensor_power(
            partial_transpose(state.mat, D33), D33, 2
        )
        power_then_pt = partial_transpose(powered, big)
        assert float(np.abs(pt_then_power - power_then_pt).max()) <= 1e-14

    def test_product_of_distinct_factors(self):
        # regrouped PT of rho1 (x) rho2 equals the product of the individual PTs
        gen = SplitMix64(61)
        rho1 = _random_psd_state(gen, Dims(2, 2), 3).mat
        rho2 = _random_psd_state(gen, Dims(2, 2), 2).mat
        prod = tensor(rho1, rho2).reshape([2] * 8)
        regrouped = prod.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(16, 16)
        lhs = partial_transpose(regrouped, Dims(4, 4))
        pt_each = tensor(
            partial_transpose(rho1, Dims(2, 2)), partial_transpose(rho2, Dims(2, 2))
        ).reshape([2] * 8)
        rhs = pt_each.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(16, 16)
        assert float(np.abs(lhs - rhs).max()) <= 1e-15

    def test_copy_cap(self):
        state = _random_psd_state(SplitMix64(67), D33, 2)
        with pytest.raises(ValueError):
            tensor_power_bipartite(state, 3)

    def test_dimension_cap(self):
        gen = SplitMix64(71)
        m = gen.complex_matrix(16, 16)
        with pytest.raises(ValueError):
            regroup_tensor_power(m, Dims(4, 4), 4)


class TestStateValidation:
    def test_rejects_non_hermitian(self):
        m = np.eye(9, dtype=complex)
        m[0, 1] = 0.5
        with pytest.raises(ValueError):
            BipartiteState(m, D33)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            BipartiteState(-np.eye(9), D33)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            BipartiteState(np.eye(8), D33)

    def test_unnormalized_trace_allowed(self):
        st = BipartiteState(3.7 * np.eye(9), D33)
        assert abs(st.trace - 33.3) < 1e-12
        assert abs(st.normalized().trace - 1.0) < 1e-14

    def test_pure_state_norm_flag(self):
        with pytest.raises(ValueError):
            PureState(np.ones(9), D33)
        ps = PureState(np.ones(9), D33, unnormalized=True)
        assert ps.vec.shape == (9,)

    def test_rejects_non_finite_entries(self):
        bad = np.eye(9, dtype=complex)
        bad[0, 0] = np.nan
        with pytest.raises(ValueError):
            BipartiteState(bad, D33)
        vec = np.zeros(9, dtype=complex)
        vec[0] = np.nan
        with pytest.raises(ValueError):
            PureState(vec, D33)

    def test_accepts_non_contiguous_input(self):
        big = np.zeros((18, 18), dtype=complex)
        big[::2, ::2] = np.eye(9)
        st = BipartiteState(big[::2, ::2], D33)
        assert abs(st.trace - 9.0) < 1e-14

    def test_ppt_detection(self):
        mes_state = BipartiteState(maximally_entangled_qutrits().projector(), D33)
        assert not is_ppt(mes_state)
        assert is_ppt(BipartiteState(np.eye(9) / 9, D33))
