import warnings
from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from cdclcrypto.diffpath import (CollisionWarning, DifferentialPath, PathError,
                                 build_collision_instance, extract_and_verify, load_path,
                                 parse_path, verify_pair)
from cdclcrypto.plugins.conditions import ALPHABET, CHAR_TO_MASK, PAIRS
from cdclcrypto.solver import Solver, Status

# a 9-step colliding pair found by this package and checked against the reference hash
PAIR_9 = (
    [4126123568, 2509196330, 1089999965, 2012781158, 2292025624, 1734703530, 3145975624,
     2627468295, 1134951983, 0, 0, 0, 0, 0, 0, 0],
    [3737621597, 3496671398, 3177108955, 2927947316, 432659277, 3862991599, 1551611794,
     1541143645, 1523453954, 0, 0, 0, 0, 0, 0, 0],
)


def _word(pos_char: dict[int, str], fill="?") -> str:
    """Display string (MSB first) with the given bits overridden."""
    s = [fill] * 32
    for k, c in pos_char.items():
        s[31 - k] = c
    return "".join(s)


def _solve(inst, plugins=(), assumptions=()):
    s = Solver(inst.num_vars, inst.clauses)
    for p in inst.plugins(plugins):
        s.register_extension(p)
    return s.solve(list(assumptions))


def test_parse_single_x_storage_is_lsb_first():
    p = parse_path("3 W --------x-----------------------\n")
    masks = p.get(3, "W")
    assert masks[23] == CHAR_TO_MASK["x"]
    assert all(m == CHAR_TO_MASK["-"] for i, m in enumerate(masks) if i != 23)
    assert p.display(3, "W") == "--------x-----------------------"


def test_unlisted_words_are_free():
    p = parse_path("")
    assert p.conditions == {} and p.rounds is None
    assert p.get(7, "E") == (0xF,) * 32


def test_comments_and_rounds():
    p = parse_path("# origin\n\nrounds 4\n0 A " + "0" * 32 + "\n")
    assert p.provenance == ["origin"]
    assert p.rounds == 4
    assert p.get(0, "A") == (CHAR_TO_MASK["0"],) * 32


@pytest.mark.parametrize("text, line, fragment", [
    ("1 W " + "z" * 32, 1, "character"),
    ("\n1 W " + "-" * 31, 2, "32"),
    ("1 W " + "-" * 32 + "\n1 W " + "?" * 32, 2, "duplicate"),
    ("1 W " + "#" + "-" * 31, 1, "infeasible"),
    ("1 Q " + "-" * 32, 1, "word"),
    ("x W " + "-" * 32, 1, "round"),
    ("rounds 3\nrounds 4", 2, "duplicate"),
    ("rounds many", 1, "rounds"),
    ("1 W", 1, "expected"),
])
def test_parse_errors_carry_line(text, line, fragment):
    with pytest.raises(PathError) as e:
        parse_path(text)
    assert e.value.line == line
    assert fragment in str(e.value)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 30), st.sampled_from("WAE")),
                       st.text(alphabet=ALPHABET.replace("#", ""), min_size=32, max_size=32),
                       max_size=6),
       st.one_of(st.none(), st.integers(1, 64)))
def test_dumps_roundtrip(entries, rounds):
    p = DifferentialPath(rounds=rounds, provenance=["generated"])
    for (t, w), disp in entries.items():
        p.set(t, w, disp)
    back = parse_path(p.dumps())
    assert back == p


def test_shipped_paths_parse():
    root = resources.files("cdclcrypto") / "data" / "paths"
    names = sorted(f.name for f in root.iterdir() if f.name.endswith(".txt"))
    assert names == ["local_collision_w0.txt", "single_bit_w5.txt"]
    for n in names:
        p = load_path(root / n)
        assert p.rounds is not None and p.provenance


def test_path_too_short_rejected():
    with pytest.raises(ValueError):
        build_collision_instance(parse_path("rounds 2"), 3)
    with pytest.raises(ValueError):
        build_collision_instance(parse_path(""), 65)


def test_single_x_in_unused_word_gives_one_bit_pair():
    p = DifferentialPath()
    p.set(5, "W", _word({23: "x"}))
    inst = build_collision_instance(p, 1)
    r = _solve(inst)
    assert r.status is Status.SAT
    col = extract_and_verify(inst, r.lit_true)
    assert col.verified
    assert [a ^ b for a, b in zip(col.m, col.mp)] == [0] * 5 + [1 << 23] + [0] * 10
    assert col.digest == col.digest_p


def test_difference_in_first_word_cannot_collide_in_one_step():
    p = DifferentialPath()
    p.set(0, "W", _word({8: "x"}))
    assert _solve(build_collision_instance(p, 1)).status is Status.UNSAT


def test_all_dash_message_warns_and_is_unsat():
    p = DifferentialPath()
    for t in range(16):
        p.set(t, "W", "-" * 32)
    with pytest.warns(CollisionWarning):
        inst = build_collision_instance(p, 2)
    assert inst.warnings
    assert _solve(inst).status is Status.UNSAT


def test_free_path_builds_without_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        inst = build_collision_instance(parse_path(""), 1)
    assert inst.warnings == []


def test_u_condition_fixes_pair():
    p = DifferentialPath()
    p.set(6, "W", _word({3: "u"}))
    inst = build_collision_instance(p, 1)
    r = _solve(inst)
    x, xp = inst.message[0][6].bits[3], inst.message[1][6].bits[3]
    assert (r.lit_true(x), r.lit_true(xp)) == (True, False)


@pytest.mark.parametrize("ch", list(ALPHABET))
def test_condition_admits_exactly_its_pairs(ch):
    p = DifferentialPath()
    p.conditions[(5, "W")] = tuple(CHAR_TO_MASK[ch] if i == 3 else 0xF for i in range(32))
    inst = build_collision_instance(p, 1)
    x, xp = inst.message[0][5].bits[3], inst.message[1][5].bits[3]
    for i, (a, ap) in enumerate(PAIRS):
        r = _solve(inst, assumptions=[x if a else -x, xp if ap else -xp])
        allowed = bool(CHAR_TO_MASK[ch] >> i & 1)
        assert (r.status is Status.SAT) == allowed, (ch, a, ap)


@settings(max_examples=8, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 15), st.integers(0, 31), st.booleans()),
                max_size=12))
def test_difference_vars_are_xors_in_models(fixed):
    inst = build_collision_instance(parse_path(""), 2)
    assume = []
    for t, k, v in fixed:
        lit = inst.message[0][t].bits[k]
        if -lit not in assume and lit not in assume:
            assume.append(lit if v else -lit)
    r = _solve(inst, assumptions=assume)
    if r.status is not Status.SAT:
        return
    val = r.lit_true
    for (a, b), d in inst.d_vars.items():
        assert val(d) == (val(a) != val(b))
    assert extract_and_verify(inst, val).verified


def test_difference_vars_match_tracked_count():
    inst = build_collision_instance(parse_path(""), 1)
    assert inst.tracked_bits == len(inst.d_vars)
    assert all(a != b for a, b in inst.d_vars)


def test_tracked_bit_count_for_shipped_path():
    root = resources.files("cdclcrypto") / "data" / "paths"
    inst = build_collision_instance(load_path(root / "local_collision_w0.txt"), 18)
    assert inst.tracked_bits == 4209
    assert inst.metadata()["tracked_bits"] == 4209


def test_equal_messages_do_not_verify():
    inst = build_collision_instance(parse_path(""), 1)
    col = extract_and_verify(inst, lambda lit: False)
    assert col.m == col.mp and not col.verified


def test_known_pair_verifies():
    # the difference is cancelled by step 9 and resurfaces once W[16] enters
    assert [r for r in range(1, 65) if verify_pair(*PAIR_9, rounds=r)[0]] == list(range(9, 17))


def test_unequal_digests_do_not_verify():
    m = [0] * 16
    mp = [1] + [0] * 15
    ok, h, hp = verify_pair(m, mp, 1)
    assert not ok and h != hp


def test_report_lists_both_blocks():
    inst = build_collision_instance(parse_path(""), 1)
    text = extract_and_verify(inst, lambda lit: False).report(1)
    assert "verified NO" in text and text.count("0" * 128) == 2


def test_gc_plugin_search_verifies():
    p = DifferentialPath()
    p.set(15, "W", _word({0: "x"}))
    inst = build_collision_instance(p, 1)
    r = _solve(inst, plugins=("gc",))
    assert r.status is Status.SAT
    assert extract_and_verify(inst, r.lit_true).verified
