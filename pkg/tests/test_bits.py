import numpy as np
import pytest
from hypothesis import given, strategies as st

from lambdacodec.codec.bits import (
    BitReader,
    BitstreamError,
    BitWriter,
    se_len,
    se_len_array,
    se_to_ue,
    ue_len,
    ue_len_array,
    ue_to_se,
)


def _ue_string(v):
    w = BitWriter()
    w.ue(v)
    return w.getbits()


def test_unsigned_codewords():
    assert [_ue_string(v) for v in range(4)] == ["1", "010", "011", "00100"]


def test_signed_mapping():
    assert [se_to_ue(v) for v in (0, 1, -1, 2, -2)] == [0, 1, 2, 3, 4]
    w = BitWriter()
    w.se(-1)
    assert w.getbits() == "011"


def _ue_len_oracle(v):
    # count by construction: floor(log2(v+1)) zeros, then v+1 in binary
    n = 0
    while (v + 1) >> (n + 1):
        n += 1
    return 2 * n + 1


@given(st.integers(0, 10**9))
def test_ue_len_matches_oracle(v):
    assert ue_len(v) == _ue_len_oracle(v) == len(_ue_string(v))


@given(st.lists(st.integers(-(10**6), 10**6), min_size=1, max_size=50))
def test_vector_lengths(vals):
    arr = np.array(vals)
    assert se_len_array(arr).tolist() == [se_len(v) for v in vals]
    mags = np.abs(arr)
    assert ue_len_array(mags).tolist() == [ue_len(v) for v in mags.tolist()]


@given(st.integers(-(10**6), 10**6))
def test_se_inverse(v):
    assert ue_to_se(se_to_ue(v)) == v


@given(
    st.lists(
        st.one_of(
            st.tuples(st.just("ue"), st.integers(0, 2**20)),
            st.tuples(st.just("se"), st.integers(-(2**20), 2**20)),
            st.tuples(st.just("bit"), st.integers(0, 1)),
            st.tuples(st.just("u8"), st.integers(0, 255)),
        ),
        max_size=40,
    )
)
def test_round_trip(ops):
    w = BitWriter()
    for kind, v in ops:
        if kind == "u8":
            w.write(v, 8)
        else:
            getattr(w, kind)(v)
    data = w.to_bytes()
    assert len(data) == (w.nbits + 7) // 8
    r = BitReader(data, w.nbits)
    for kind, v in ops:
        got = r.read(8) if kind == "u8" else getattr(r, kind)()
        assert got == v
    assert r.remaining() == 0


def test_reader_errors():
    with pytest.raises(BitstreamError):
        BitReader("000").ue()
    with pytest.raises(BitstreamError):
        BitReader("0" * 33 + "1" + "0" * 33).ue()
    with pytest.raises(BitstreamError):
        BitReader("0001").ue()
    with pytest.raises(BitstreamError):
        BitReader("1").read(2)
    with pytest.raises(BitstreamError):
        BitReader(b"\x00", 9)


def test_writer_rejects_overflow_and_negative():
    w = BitWriter()
    with pytest.raises(BitstreamError):
        w.write(4, 2)
    with pytest.raises(BitstreamError):
        w.ue(-1)


def test_zero_padding_of_final_byte():
    w = BitWriter()
    w.bit(1)
    assert w.to_bytes() == b"\x80"
