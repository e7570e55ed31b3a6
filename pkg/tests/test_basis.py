import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obe3b.basis import SectorSpec, enumerate_channels, p23_matrix, symmetrize
from obe3b.coeffs import BMTable
from obe3b.states import ChannelState, QLBlock, block_states

TABLE1_SIZES = {6: 7, 8: 11, 10: 16, 12: 23, 14: 31, 16: 41, 18: 53, 20: 67, 22: 83, 24: 102}


def test_enumerate_examples():
    assert enumerate_channels(SectorSpec(0, 1, "three_identical", 1, 0)) == [ChannelState(0, 0, 0, 0, 0)]
    got = enumerate_channels(SectorSpec(0, 1, "three_identical", 1, 2))
    assert set(got) == {ChannelState(0, 0, 0, 0, 0), ChannelState(1, 0, 0, 0, 0), ChannelState(0, 0, 1, 0, 0)}
    # (0,1,0,1) has odd lx and drops out for sigma = +1; it is there without exchange symmetry
    assert ChannelState(0, 1, 0, 1, 0) in enumerate_channels(SectorSpec(0, 1, "none", 1, 2))
    assert enumerate_channels(SectorSpec(0, -1, "none", 1, 2)) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), st.sampled_from([1, -1]), st.sampled_from([1, -1]), st.integers(0, 9))
def test_enumerate_matches_brute_force(L, parity, sigma, qmax):
    sec = SectorSpec(L, parity, "two_identical", sigma, qmax)
    brute = set()
    for nx in range(qmax // 2 + 1):
        for ny in range(qmax // 2 + 1):
            for lx in range(qmax + 1):
                for ly in range(qmax + 1):
                    s = ChannelState(nx, lx, ny, ly, L)
                    if s.Q <= qmax and abs(lx - ly) <= L <= lx + ly and s.parity == parity and (-1) ** lx == sigma:
                        brute.add(s)
    got = enumerate_channels(sec)
    assert len(got) == len(set(got)) and set(got) == brute
    assert [c.Q for c in got] == sorted(c.Q for c in got)


def test_block_ordering():
    states = block_states(4, 2)
    assert list(states) == sorted(states, key=lambda s: (s.lx, s.ly, s.nx))
    assert all(s.Q == 4 and abs(s.lx - s.ly) <= 2 <= s.lx + s.ly for s in states)


def test_p23_needs_pi_over_6():
    with pytest.raises(ValueError):
        p23_matrix(QLBlock(2, 0), BMTable(0.5))


def test_p23_involution_and_spectrum(bm_pi6):
    assert p23_matrix(QLBlock(0, 0), bm_pi6) == pytest.approx(np.ones((1, 1)))
    for Q in range(13):
        for L in range(Q + 1):
            blk = QLBlock(Q, L)
            if not blk.states:
                continue
            P = p23_matrix(blk, bm_pi6)
            assert np.abs(P @ P - np.eye(len(P))).max() <= 1e-10
            assert np.abs(P - P.T).max() <= 1e-10
            w = np.linalg.eigvalsh(P)
            assert np.all(np.minimum(np.abs(w - 1), np.abs(w + 1)) <= 1e-10)


def test_p23_q2_even_block(bm_pi6):
    blk = QLBlock(2, 0)
    keep = [i for i, s in enumerate(blk.states) if s.lx % 2 == 0]
    P = p23_matrix(blk, bm_pi6)
    w = np.linalg.eigvalsh(P)
    assert set(np.round(w).astype(int)) <= {-1, 1}
    assert len(keep) == 2


@pytest.mark.parametrize("qmax, n", sorted(TABLE1_SIZES.items()))
def test_table1_basis_sizes(qmax, n, bm_pi6):
    assert symmetrize(SectorSpec(0, 1, "three_identical", 1, qmax), bm=bm_pi6).size == n


@pytest.mark.parametrize("L, parity, sigma", [(0, 1, 1), (2, 1, 1), (1, -1, 1), (3, -1, 1), (0, 1, -1), (1, -1, -1)])
def test_symmetrized_columns(L, parity, sigma, bm_pi6):
    sec = SectorSpec(L, parity, "three_identical", sigma, 12)
    basis = symmetrize(sec, bm=bm_pi6)
    T = basis.transform
    assert np.abs(T.T @ T - np.eye(basis.size)).max() <= 1e-10
    pos = {c: i for i, c in enumerate(basis.channels)}
    assert all((-1) ** c.lx == sigma for c in basis.channels)
    for k, (Q, LL) in enumerate(basis.block_of_column):
        blk = QLBlock(Q, LL)
        v = np.zeros(len(blk.states))
        for i, s in enumerate(blk.states):
            if s in pos:
                v[i] = T[pos[s], k]
        # support inside one block and the P23 eigen-equation on the full block
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        assert np.abs(p23_matrix(blk, bm_pi6) @ v - sigma * v).max() <= 1e-8


def test_trivial_and_identity_cases(bm_pi6):
    b0 = symmetrize(SectorSpec(0, 1, "three_identical", 1, 0), bm=bm_pi6)
    assert b0.size == 1 and b0.channels == [ChannelState(0, 0, 0, 0, 0)]
    assert abs(b0.transform[0, 0]) == pytest.approx(1.0)
    for exch in ("none", "two_identical"):
        sec = SectorSpec(2, 1, exch, 1, 6)
        b = symmetrize(sec)
        assert np.array_equal(b.transform, np.eye(len(enumerate_channels(sec))))
    empty = symmetrize(SectorSpec(0, -1, "three_identical", 1, 3), bm=bm_pi6)
    assert empty.size == 0


@pytest.mark.parametrize("L, parity", [(0, 1), (1, -1), (2, 1), (3, -1)])
def test_symmetric_count_from_characters(L, parity, bm_pi6):
    # S3 characters: n_sym = (dim + 3 tr P12 + 2 tr P12 P23) / 6, n_anti with the signs of the sign rep
    for sigma in (1, -1):
        expected = 0
        for Q in range(12 + 1):
            blk = QLBlock(Q, L)
            if (-1) ** Q != parity or not blk.states:
                continue
            P12 = np.diag([(-1.0) ** s.lx for s in blk.states])
            P23 = p23_matrix(blk, bm_pi6)
            expected += round((len(blk.states) + 3 * sigma * np.trace(P12) + 2 * np.trace(P12 @ P23)) / 6)
        got = symmetrize(SectorSpec(L, parity, "three_identical", sigma, 12), bm=bm_pi6).size
        assert got == expected


def test_sector_validation():
    with pytest.raises(ValueError):
        SectorSpec(0, 2)
    with pytest.raises(ValueError):
        SectorSpec(-1, 1)
    with pytest.raises(ValueError):
        SectorSpec(0, 1, "four_identical")
