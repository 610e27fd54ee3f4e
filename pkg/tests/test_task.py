import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bklab import bigkey, task
from bklab.field import decode_state
from bklab.task import AugmentedInstance, IndexOutOfRange, Instance, ProblemState, TaskError


def test_share_count_defaults():
    # header 12 bytes + 8 keys of (8 id + 128 key) bytes + 8 length bytes, in 16-byte words
    assert task.share_count(8, 1024, 128) == -(-(12 + 8 * 136 + 8) // 16) == 70


def test_gen_shape(small_state):
    st_ = small_state
    assert st_.n == 8 and len(st_.handles) == 8
    assert len({h.key_id for h in st_.handles}) == 8
    assert all(k.ell == 256 for k in st_.keys)
    assert st_.t == task.share_count(8, 256, 128)


def test_gen_is_seeded():
    a = task.gen(128, 256, 4, np.random.default_rng(3))
    b = task.gen(128, 256, 4, np.random.default_rng(3))
    assert a.to_bytes() == b.to_bytes()


def test_gen_rejects_bad_params(rng):
    with pytest.raises(task.BadParams):
        task.gen(128, 256, 1, rng)
    with pytest.raises(task.BadParams):
        task.gen(128, 64, 4, rng)


def test_state_serialization(small_state):
    data = small_state.to_bytes()
    again = ProblemState.from_bytes(data)
    assert again.to_bytes() == data
    assert again.keys == small_state.keys
    with pytest.raises(TaskError):
        ProblemState.from_bytes(data[:-1])


def test_share_poly_encodes_state(small_state):
    assert decode_state(small_state.field, small_state.share_poly) == small_state.to_bytes()


@pytest.mark.parametrize("b", [0, 1])
def test_samp_decrypts_to_class(small_state, b, rng):
    for _ in range(20):
        assert task.decrypt_all(small_state, task.samp(small_state, b, rng)) == [b] * 8


def test_hybrid_example(small_state, rng):
    # J = {0, 2} flips exactly those two features
    x = task.samp_hybrid(small_state, {0, 2}, 1, rng)
    assert task.decrypt_all(small_state, x) == [0, 1, 0, 1, 1, 1, 1, 1]


@settings(max_examples=25, deadline=None)
@given(st.sets(st.integers(0, 7)), st.integers(0, 1))
def test_hybrid_batch_plaintexts(small_state, J, b):
    rng = np.random.default_rng(len(J) * 2 + b)
    expect = [b ^ (i in J) for i in range(8)]
    batch = task.hybrid_batch(small_state.handles, J, b, 5, rng)
    assert len(batch) == 5
    assert all(task.decrypt_all(small_state, x) == expect for x in batch)


def test_hybrid_endpoints(small_state, rng):
    all_ = set(range(8))
    assert task.decrypt_all(small_state, task.samp_hybrid(small_state, all_, 0, rng)) == [1] * 8
    assert task.decrypt_all(small_state, task.samp_hybrid(small_state, (), 0, rng)) == [0] * 8


def test_hybrid_index_checks(small_state, rng):
    with pytest.raises(IndexOutOfRange):
        task.samp_hybrid(small_state, {8}, 0, rng)
    with pytest.raises(IndexOutOfRange):
        task.hybrid_batch(small_state.handles, {-1}, 0, 1, rng)
    with pytest.raises(TaskError):
        task.samp(small_state, 2, rng)


def test_hybrid_batch_needs_only_public_handles(small_state, rng):
    handles = [bigkey.EncHandle(h.key_id, h.table) for h in small_state.handles]
    x = task.hybrid_batch(handles, (), 1, 1, rng)[0]
    assert task.decrypt_all(small_state, x) == [1] * 8


def test_instance_bytes(small_state, rng):
    x = task.samp(small_state, 1, rng)
    data = x.to_bytes()
    assert len(data) == 7 + 8 * 17
    assert x.bit_size() == 8 * 129
    assert Instance.from_bytes(data) == x
    with pytest.raises(TaskError):
        Instance.from_bytes(data + b"\x00")


def test_augmented_overhead(small_state, rng):
    a = task.samp_augmented(small_state, 0, rng)
    assert a.bit_size() - a.base.bit_size() == 2 * 128
    assert len(a.to_bytes()) - len(a.base.to_bytes()) == 2 * 16
    assert AugmentedInstance.from_bytes(a.to_bytes()) == a
    with pytest.raises(TaskError):
        Instance.from_bytes(a.to_bytes())
    with pytest.raises(TaskError):
        AugmentedInstance.from_bytes(a.base.to_bytes())
    assert task.decrypt_all(small_state, a.base) == [0] * 8


def test_replace_features(small_state, rng):
    x = task.samp(small_state, 1, rng)
    c = bigkey.enc(small_state.handles[3], 0, rng)
    y = task.replace_features(x, {3: c})
    assert y.features[3] == c and y.features[:3] == x.features[:3]
    assert x.features[3] != c
