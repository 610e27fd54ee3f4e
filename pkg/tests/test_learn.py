import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bklab import bigkey, learn, task
from bklab.learn import MalformedModel, Model


def test_index_bits():
    assert [learn.index_bits(n) for n in (2, 3, 4, 5, 8, 9)] == [1, 2, 2, 3, 3, 4]


def test_known_metric_example(rng):
    # T = {2, 4}: i* = 2 and the model is ell + 3 bits at n = 8, ell = 1024
    st_ = task.gen(128, 1024, 8, rng)
    h = learn.learn_known_metric({4, 2}, st_)
    assert h.declared_bits == 1027
    assert learn.model_keys(h) == {2: st_.keys[2].sk}
    assert learn.serialized_model_bits(h.to_bytes()) == 1027


def test_known_metric_empty_set(small_state):
    with pytest.raises(learn.EmptyProtectedSet):
        learn.learn_known_metric(set(), small_state)


def test_model_sizes(small_state):
    ell = small_state.ell
    assert learn.learn_all(small_state).declared_bits == 8 * ell
    assert learn.learn_partial(small_state, [5, 0, 2]).declared_bits == 3 * (ell + 3)
    assert learn.learn_partial(small_state, []).declared_bits == 0


@settings(max_examples=30, deadline=None)
@given(st.sets(st.integers(0, 7)))
def test_model_roundtrip(small_state, S):
    h = learn.learn_partial(small_state, S)
    data = h.to_bytes()
    assert Model.from_bytes(data) == h
    assert learn.serialized_model_bits(data) == h.declared_bits
    assert learn.model_keys(h) == {i: small_state.keys[i].sk for i in S}


def test_model_decoding_rejects_tampering(small_state):
    data = bytearray(learn.learn_all(small_state).to_bytes())
    with pytest.raises(MalformedModel):
        Model.from_bytes(bytes(data[:-1]))
    data[0] = 9
    with pytest.raises(MalformedModel):
        Model.from_bytes(bytes(data))
    with pytest.raises(MalformedModel):
        Model("all-keys", 1 << 20, 8, 8, 256, 0)


def test_classify_small_reads_one_feature(small_state, rng):
    h = learn.learn_known_metric({3, 6}, small_state)
    x = task.samp_hybrid(small_state, {0, 1, 2, 4, 5, 6, 7}, 1, rng)
    # only feature 3 encrypts 1
    assert learn.classify_small(h, x) == 1
    assert learn.classifier_for(h)(x) == 1
    with pytest.raises(MalformedModel):
        learn.classify_small(learn.learn_all(small_state), x)


def brute_majority(st_, S, x):
    bits = [bigkey.dec(st_.keys[i], x.features[i]) for i in S]
    return int(sum(bits) > len(bits) / 2)


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(0, 7)), st.sets(st.integers(0, 7)), st.integers(0, 1))
def test_majority_matches_brute_force(small_state, S, J, b):
    rng = np.random.default_rng(7)
    x = task.samp_hybrid(small_state, J, b, rng)
    h = learn.learn_partial(small_state, S)
    expect = brute_majority(small_state, sorted(S), x)
    assert learn.classify_majority(h, x) == expect
    assert learn.classifier_for(h)(x) == expect


def test_majority_ties_go_to_zero(small_state, rng):
    h = learn.learn_partial(small_state, [0, 1])
    x = task.samp_hybrid(small_state, {1}, 1, rng)
    assert learn.classify_majority(h, x) == 0
    assert learn.classify_majority(learn.learn_partial(small_state, []), x) == 0


def test_full_model_is_exact_on_clean_samples(small_state, rng):
    C = learn.classifier_for(learn.learn_all(small_state))
    for b in (0, 1) * 20:
        assert C(task.samp(small_state, b, rng)) == b


def test_oracle_counts_queries(small_state, rng):
    oracle = learn.ClassifierOracle.for_model(learn.learn_all(small_state))
    for _ in range(5):
        oracle(task.samp(small_state, 1, rng))
    oracle.classify(task.samp(small_state, 0, rng))
    assert oracle.query_count == 6
    assert not oracle.randomized


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_learn_from_shares(seed):
    rng = np.random.default_rng(seed)
    st_ = task.gen(128, 256, 4, rng)
    t = task.share_count(4, 256, 128)
    samples = [(task.samp_augmented(st_, c, rng), c) for c in rng.integers(2, size=t + 3).tolist()]
    rec = learn.learn_from_shares(samples, t)
    assert rec.to_bytes() == st_.to_bytes()
    # bare instances work too
    assert learn.learn_from_shares([a for a, _ in samples], t).keys == st_.keys
    with pytest.raises(learn.InsufficientSamples):
        learn.learn_from_shares(samples[:t - 1], t)


def test_model_size_ok(small_state):
    h = learn.learn_partial(small_state, [0, 1, 2])
    assert learn.model_size_ok(h, 8 * 256 // 2)
    assert not learn.model_size_ok(learn.learn_all(small_state), 8 * 256 // 2)
