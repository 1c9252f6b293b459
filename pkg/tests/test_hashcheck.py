import random

import pytest

from cdclcrypto.encoder import reference as ref
from cdclcrypto.plugins.hashcheck import MessageSpec, hash_check, secret_values
from helpers import FakeView

WORDS = {t: tuple(range(1 + 32 * t, 33 + 32 * t)) for t in range(16)}


def view_for(block, drop=()):
    vals = {}
    for t, bits in WORDS.items():
        for i, v in enumerate(bits):
            vals[v] = bool(block[t] >> i & 1)
    for v in drop:
        vals.pop(v)
    return FakeView(vals)


def spec_for(block, fn="sha256", rounds=8):
    return MessageSpec(fn, rounds, ref.compress(fn, block, None, rounds), words=WORDS)


def test_true_preimage_no_conflict():
    block = list(range(16))
    assert hash_check(view_for(block), spec_for(block)) == []


def test_wrong_message_blocked():
    block = list(range(16))
    spec = spec_for(block)
    wrong = block[:]
    wrong[3] ^= 1
    view = view_for(wrong)
    out = hash_check(view, spec)
    assert len(out) == 1 and len(out[0]) == 512
    assert all(view.lit_value(l) is False for l in out[0])


def test_partial_assignment_ignored():
    block = list(range(16))
    spec = spec_for(block)
    wrong = block[:]
    wrong[0] ^= 2
    assert hash_check(view_for(wrong, drop=[WORDS[5][7]]), spec) == []


def test_secret_values_decoding():
    rng = random.Random(1)
    block = [rng.getrandbits(32) for _ in range(16)]
    state, words, lits = secret_values(view_for(block), spec_for(block))
    assert state == [] and [words[t] for t in range(16)] == block
    assert len(lits) == 512


def test_suffix_mode():
    rng = random.Random(2)
    block = [rng.getrandbits(32) for _ in range(16)]
    w = ref.sha1_schedule(block, 20)
    mid = ref.sha1_rounds(ref.SHA1_IV, w, 0, 15)
    state_bits = [tuple(range(1000 + 32 * i, 1032 + 32 * i)) for i in range(5)]
    words = {t: tuple(range(2000 + 32 * t, 2032 + 32 * t)) for t in range(15, 20)}
    spec = MessageSpec("sha1", 20, ref.sha1_compress(block, rounds=20), start=15,
                       state=state_bits, words=words)
    assert spec.evaluate(mid, {t: w[t] for t in range(15, 20)}) == spec.digest
    vals = {}
    for bits, x in zip(state_bits, mid):
        vals.update({v: bool(x >> i & 1) for i, v in enumerate(bits)})
    for t, bits in words.items():
        vals.update({v: bool(w[t] >> i & 1) for i, v in enumerate(bits)})
    assert hash_check(FakeView(vals), spec) == []
    vals[1000] = not vals[1000]
    assert len(hash_check(FakeView(vals), spec)[0]) == len(spec.bits())


def test_spec_validation():
    with pytest.raises(ValueError):
        MessageSpec("md5", 1, (0,) * 4, words=WORDS)
    with pytest.raises(ValueError):
        MessageSpec("sha1", 1, (0,) * 8, words=WORDS)
    with pytest.raises(ValueError):
        MessageSpec("sha256", 1, (0,) * 8, words={0: (1,)})
