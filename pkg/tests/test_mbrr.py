import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import GRID_4x4
from oracles import RefField
from rackcodes import CodeParams, MbrrCode, gf, linalg
from rackcodes.errors import InconsistentDataError, InsufficientDataError, ParameterError
from rackcodes.mbrr import mbrr_info_set, message_row_sets, recover_symmetric


def test_row_sets_4x4():
    assert message_row_sets(GRID_4x4) == [[0, 1, 4, 5, 8, 9, 12], [2, 6, 10], [3, 7, 11]]


def test_message_layout_4x4(mbrr_4x4):
    # reference value: transpose of M for data s1..s20, with s_i written as i
    MT = mbrr_4x4.fill_message(np.arange(1, 21)).T.tolist()
    assert MT == [
        [1, 3, 5, 7, 9, 11, 6, 8, 15, 17, 0, 0, 19],
        [2, 4, 6, 8, 10, 12, 13, 14, 16, 18, 0, 0, 20],
    ]
    M = mbrr_4x4.fill_message(np.arange(1, 21))
    assert mbrr_4x4.symmetric_block(M, 1).tolist() == [[5, 6], [6, 13]]
    assert mbrr_4x4.symmetric_block(M, 2).tolist() == [[7, 8], [8, 14]]
    assert mbrr_4x4.extract_message(M).tolist() == list(range(1, 21))


def test_info_set_size_and_shape():
    X = mbrr_info_set(GRID_4x4)
    assert len(X) == 20 and X == sorted(X)
    assert all(x < 13 * 2 for x in X)


def test_check_message_rejects_broken_structure(mbrr_4x4):
    M = mbrr_4x4.fill_message(np.arange(1, 21))
    M[2, 1] = 0
    with pytest.raises(InconsistentDataError):
        mbrr_4x4.check_message(M)
    M = mbrr_4x4.fill_message(np.arange(1, 21))
    M[10, 0] = 1
    with pytest.raises(InconsistentDataError):
        mbrr_4x4.check_message(M)


def test_rack_level_against_reference_definition(mbrr_4x4):
    p, ref, F = GRID_4x4, RefField(29), mbrr_4x4.field
    xi = 2
    eta = ref.pow(xi, 28 // p.u)
    u_inv = ref.inv(p.u)
    rng = np.random.default_rng(3)
    C = mbrr_4x4.encode_data(F.random(20, rng))
    M = linalg.solve(F, mbrr_4x4.Lambda[:13], C[:13])
    for i in range(p.u - p.l):
        s = p.l + i
        expect = []
        for e in range(p.nbar):
            scale = ref.mul(u_inv, ref.inv(ref.pow(xi, e * s)))
            row = []
            for a in range(p.dbar):
                acc = 0
                for g in range(p.u):
                    coef = ref.inv(ref.pow(eta, s * g))
                    acc = ref.add(acc, ref.mul(coef, int(C[e * p.u + g, a])))
                row.append(ref.mul(scale, acc))
            expect.append(row)
        got = mbrr_4x4.rack_level(C, i)
        assert got.tolist() == expect
        S = mbrr_4x4.symmetric_block(M, i + 1)
        assert np.array_equal(S, S.T)
        assert np.array_equal(F.matmul(mbrr_4x4.Gamma, S), got)


def test_delta_maps_rack_to_rack_level_rows(mbrr_4x4):
    C = mbrr_4x4.encode_data(np.arange(20))
    for e in range(4):
        stacked = mbrr_4x4.field.matmul(mbrr_4x4.delta(e), C[mbrr_4x4.rack_nodes(e)])
        for i in range(2):
            assert stacked[i].tolist() == mbrr_4x4.rack_level(C, i)[e].tolist()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 5))
def test_recover_symmetric_uses_upper_triangle_only(seed, d):
    F = gf.prime_field(31)
    rng = np.random.default_rng(seed)
    S = F.random((d, d), rng)
    S = np.triu(S) + np.triu(S, 1).T
    gamma = linalg.vandermonde(F, [int(F.pow(3, 5 * e)) for e in range(d)], range(d)).T
    W = F.matmul(gamma, S)
    W_masked = np.where(np.triu(np.ones((d, d), dtype=bool)), W, 99)
    assert np.array_equal(recover_symmetric(F, gamma, W_masked), S)


def test_systematic_readback(mbrr_4x4):
    rng = np.random.default_rng(5)
    for _ in range(20):
        data = mbrr_4x4.field.random(20, rng)
        C = mbrr_4x4.encode_data(data)
        assert C.reshape(-1)[mbrr_4x4.info_set].tolist() == data.tolist()
        M = mbrr_4x4.reconstruct({j: C[j] for j in range(16)})
        mbrr_4x4.check_message(M)


def test_generator_matrices(mbrr_4x4):
    F = mbrr_4x4.field
    data = np.arange(20)
    for systematic in (True, False):
        G = mbrr_4x4.generator_matrix(systematic)
        assert np.array_equal(F.matmul(data[None, :], G)[0], mbrr_4x4.encode_data(data, systematic).reshape(-1))


@pytest.mark.parametrize("systematic", [True, False])
def test_decode_round_trip(mbrr_4x4, systematic):
    data = np.arange(5, 25)
    C = mbrr_4x4.encode_data(data, systematic)
    rows = {mbrr_4x4.params.label(j): C[j] for j in range(2, 15)}
    assert mbrr_4x4.decode(rows, systematic).tolist() == data.tolist()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_any_k_nodes_reconstruct(mbrr_4x4, seed):
    rng = np.random.default_rng(seed)
    C = mbrr_4x4.encode_data(mbrr_4x4.field.random(20, rng))
    nodes = rng.choice(16, size=13, replace=False).tolist()
    assert np.array_equal(mbrr_4x4.reconstruct_codeword({j: C[j] for j in nodes}), C)


def test_reconstruct_errors(mbrr_4x4):
    C = mbrr_4x4.encode_data(np.arange(20))
    with pytest.raises(InsufficientDataError):
        mbrr_4x4.reconstruct({j: C[j] for j in range(12)})
    rows = {j: C[j].copy() for j in range(16)}
    rows[14][1] = (rows[14][1] + 1) % 29
    with pytest.raises(InconsistentDataError):
        mbrr_4x4.reconstruct(rows)
    with pytest.raises(ValueError):
        mbrr_4x4.reconstruct({j: C[j][:1] for j in range(13)})


def test_two_failure_repair_moves_four_symbols(mbrr_4x4):
    # derived: h=2 symbols from each of dbar=2 helper racks
    C = mbrr_4x4.encode_data(np.arange(20))
    plan = mbrr_4x4.repair_plan(1, [0, 3], [1, 2], [0, 2])
    contribs = {e: mbrr_4x4.helper_contribution(plan, e, C[mbrr_4x4.rack_nodes(e)]) for e in (0, 2)}
    assert sum(v.size for v in contribs.values()) == 4 == plan.cross_rack_symbols
    got = mbrr_4x4.repair(plan, contribs, C[[5, 6]])
    assert got.tolist() == C[[4, 7]].tolist()


def test_repair_matrix_matches_pipeline(mbrr_4x4):
    F = mbrr_4x4.field
    C = mbrr_4x4.encode_data(np.arange(20))
    plan = mbrr_4x4.repair_plan(2, [1], [0, 3], [3, 1])
    R = mbrr_4x4.repair_matrix(plan)
    x = np.concatenate([C[12:16].ravel(), C[4:8].ravel(), C[[8, 11]].ravel()])
    assert F.matmul(x[None, :], R)[0].tolist() == C[9].tolist()


def test_mbrr_needs_helper_racks():
    with pytest.raises(ParameterError):
        MbrrCode(CodeParams(16, 4, 13, 2, 0), gf.prime_field(29))


def test_larger_grid_round_trip():
    p = CodeParams(30, 5, 24, 3, 2)
    code = MbrrCode(p)
    rng = np.random.default_rng(8)
    data = code.field.random(code.B, rng)
    C = code.encode_data(data)
    assert C.reshape(-1)[code.info_set].tolist() == data.tolist()
    plan = code.repair_plan(4, [0, 2], [1, 3, 4], [5, 1])
    contribs = [code.helper_contribution(plan, e, C[code.rack_nodes(e)]) for e in (5, 1)]
    assert code.repair(plan, contribs, C[[21, 23, 24]]).tolist() == C[[20, 22]].tolist()
