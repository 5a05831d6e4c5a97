import random

import pytest
from hypothesis import given, strategies as st

from erasure_lab.revmap import (
    CompositionError,
    ContractError,
    ErasureSpec,
    InvertibilityError,
    MapFormatError,
    ReversibleMap,
    SpecError,
    apply,
    canonical_erasure_map,
    compose,
    erasure_condition_holds,
    format_map,
    image_env_sets,
    invert,
    load_map,
    parse_map,
    record_width,
    save_map,
    validate_bijection,
)
from erasure_lab.statespace import InitialEnsemble, JointState, encode_trits

SPECS = [
    dict(M=2, T=1, N=1),
    dict(M=1, T=1, N=1),
    dict(M=1, T=3, N=5),
    dict(M=2, T=2, N=2),
    dict(M=2, T=3, N=9),
    dict(M=3, T=2, N=1),
    dict(M=3, T=3, N=3),
    dict(M=4, T=4, N=7),
]


@pytest.fixture
def bit_spec():
    return ErasureSpec.build(2, 1, 1)


def test_validate_identity():
    f = validate_bijection(range(6), 2, 1)
    assert f == ReversibleMap.identity(2, 1)


def test_validate_rejects_duplicates():
    with pytest.raises(InvertibilityError, match=r"duplicated \[0\]; missing \[5\]"):
        validate_bijection([0, 0, 1, 2, 3, 4], 2, 1)
    with pytest.raises(InvertibilityError, match="expected 6"):
        validate_bijection([0, 1, 2], 2, 1)
    with pytest.raises(InvertibilityError, match="out of range"):
        validate_bijection([0, 1, 2, 3, 4, 6], 2, 1)


@pytest.mark.parametrize("kw", SPECS)
def test_canonical_is_bijection(kw):
    spec = ErasureSpec.build(**kw)
    f = canonical_erasure_map(spec)
    assert sorted(f.image) == list(range(spec.space.size))
    validate_bijection(f.image, spec.M, spec.T)


def test_record_width():
    assert [record_width(M) for M in (1, 2, 3, 8, 9, 26, 27)] == [1, 1, 2, 2, 3, 3, 4]


def test_canonical_bit_erasure(bit_spec):
    assert sorted(bit_spec.ensemble.members) == [2]
    f = canonical_erasure_map(bit_spec)
    assert apply(f, JointState(0, 2)) == JointState(0, 0)
    assert apply(f, JointState(1, 2)) == JointState(0, 1)
    assert apply(ReversibleMap.identity(2, 1), JointState(1, 2)) == JointState(1, 2)


def test_canonical_bit_completion_is_ascending(bit_spec):
    # unconstrained inputs 0,1,3,4 take unused outputs 2,3,4,5 in order
    assert canonical_erasure_map(bit_spec).image == (2, 3, 0, 4, 5, 1)


def test_canonical_two_trits_by_hand():
    spec = ErasureSpec.build(2, 2, 2, record_positions=[0])
    assert sorted(spec.ensemble.members) == [encode_trits([2, 0]), encode_trits([2, 1])]
    f = canonical_erasure_map(spec)
    assert f.apply(JointState(1, encode_trits([2, 1]))) == JointState(0, encode_trits([1, 1]))
    imgs = image_env_sets(f, spec)
    assert imgs.per_state == (frozenset({0, 1}), frozenset({3, 4}))
    assert len(imgs.union) == 4


def test_canonical_one_state_system():
    spec = ErasureSpec.build(1, 2, 3)
    f = canonical_erasure_map(spec)
    for e in spec.ensemble.sorted():
        out = f.apply(JointState(0, e))
        assert out.system == 0
        assert out.env == e - 2 * 3  # leading record trit 2 -> 0
    assert len(image_env_sets(f, spec).union) == spec.N


def test_record_position_choice():
    spec = ErasureSpec.build(2, 2, 3, record_positions=[1])
    assert sorted(spec.ensemble.members) == [2, 5, 8]
    f = canonical_erasure_map(spec)
    assert f.apply(JointState(1, 5)) == JointState(0, 4)


def test_spec_rejects_bad_ensemble():
    with pytest.raises(SpecError, match="record register"):
        ErasureSpec(2, 1, (0,), InitialEnsemble(frozenset({1})))
    with pytest.raises(SpecError, match="2-trit record register"):
        ErasureSpec(3, 2, (0,), InitialEnsemble(frozenset({8})))
    with pytest.raises(SpecError):
        ErasureSpec.build(2, 0, 1)
    with pytest.raises(SpecError, match="blank record register"):
        ErasureSpec.build(2, 2, 4)
    with pytest.raises(SpecError):
        ErasureSpec.build(2, 2, 1, record_positions=[2])
    with pytest.raises(SpecError):
        ErasureSpec.build(2, 1, 1, target=2)


def test_configurable_target():
    spec = ErasureSpec.build(2, 1, 1, target=1)
    f = canonical_erasure_map(spec)
    assert erasure_condition_holds(f, spec).holds
    assert f.apply(JointState(0, 2)) == JointState(1, 0)


def test_erasure_condition(bit_spec):
    f = canonical_erasure_map(bit_spec)
    assert erasure_condition_holds(f, bit_spec) == (True, None)
    ident = ReversibleMap.identity(2, 1)
    assert erasure_condition_holds(ident, bit_spec) == (False, JointState(1, 2))


def test_erasure_broken_by_final_flip(bit_spec):
    # Post-compose with a map that swaps (0, e) <-> (1, e) for every e.
    flip = validate_bijection([3, 4, 5, 0, 1, 2], 2, 1)
    g = compose(flip, canonical_erasure_map(bit_spec))
    check = erasure_condition_holds(g, bit_spec)
    assert not check.holds and check.witness == JointState(0, 2)
    with pytest.raises(ContractError):
        image_env_sets(g, bit_spec)


def test_image_sets_bit(bit_spec):
    imgs = image_env_sets(canonical_erasure_map(bit_spec), bit_spec)
    assert imgs.per_state == (frozenset({0}), frozenset({1}))
    assert imgs.union == frozenset({0, 1})


@pytest.mark.parametrize("kw", SPECS)
def test_branch_sizes_and_disjointness(kw):
    spec = ErasureSpec.build(**kw)
    imgs = image_env_sets(canonical_erasure_map(spec), spec)
    assert all(len(b) == spec.N for b in imgs.per_state)
    assert len(imgs.union) == spec.M * spec.N
    assert not imgs.union & spec.ensemble.members


def test_invert_round_trip_exhaustive():
    for M, T in [(1, 6), (2, 4), (3, 3)]:
        kw = dict(M=M, T=T, N=min(3 ** (T - record_width(M)), 4))
        spec = ErasureSpec.build(**kw)
        f = canonical_erasure_map(spec)
        g = invert(f)
        for i in range(f.size):
            assert g(f(i)) == i
        assert compose(g, f) == ReversibleMap.identity(M, T)
    assert invert(ReversibleMap.identity(2, 2)) == ReversibleMap.identity(2, 2)


def test_compose_inverse_random_permutations():
    rng = random.Random(20261015)
    for _ in range(100):
        img = list(range(18))
        rng.shuffle(img)
        f = validate_bijection(img, 2, 2)
        assert compose(f, invert(f)) == ReversibleMap.identity(2, 2)
        assert compose(invert(f), f) == ReversibleMap.identity(2, 2)


@given(st.permutations(range(6)), st.permutations(range(6)), st.permutations(range(6)))
def test_compose_associative(a, b, c):
    f, g, h = (validate_bijection(p, 2, 1) for p in (a, b, c))
    assert compose(compose(f, g), h) == compose(f, compose(g, h))
    for i in range(6):
        assert compose(f, g)(i) == f(g(i))


def test_compose_size_mismatch():
    with pytest.raises(CompositionError):
        compose(ReversibleMap.identity(2, 1), ReversibleMap.identity(3, 1))


@given(st.permutations(range(18)), st.sampled_from([0, 1, 2]))
def test_branch_injectivity_any_map(perm, _):
    # Any bijection restricted to {s} x ensemble is injective.
    spec = ErasureSpec.build(2, 2, 3)
    f = validate_bijection(perm, 2, 2)
    for s in range(2):
        outs = {f.apply(JointState(s, e)) for e in spec.ensemble.members}
        assert len(outs) == spec.N


def test_map_file_round_trip(tmp_path, bit_spec):
    f = canonical_erasure_map(bit_spec)
    path = tmp_path / "m.txt"
    save_map(f, path)
    text = path.read_text()
    assert text.splitlines()[0] == "revmap 2 1"
    assert text.splitlines()[3] == "2 -> 0"
    assert load_map(path) == f
    assert parse_map(format_map(f)) == f


@pytest.mark.parametrize(
    "text, msg",
    [
        ("", "empty"),
        ("revmap 2\n", "header"),
        ("revmap 2 1\n0 -> 1\n", "expected 6"),
        ("revmap 2 1\n0 -> 0\n1 -> 0\n2 -> 2\n3 -> 3\n4 -> 4\n5 -> 5\n", "duplicated"),
        ("revmap 2 1\n1 -> 1\n0 -> 0\n2 -> 2\n3 -> 3\n4 -> 4\n5 -> 5\n", "ascending"),
        ("revmap 2 1\n0 => 0\n1 -> 1\n2 -> 2\n3 -> 3\n4 -> 4\n5 -> 5\n", "expected"),
    ],
)
def test_map_file_strict(text, msg):
    with pytest.raises(MapFormatError, match=msg):
        parse_map(text)
