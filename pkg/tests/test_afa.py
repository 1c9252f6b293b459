import pytest

from cdclcrypto.afa import (ADMISSIBLE, CONFIRMED, AfaInstance, FaultSpec, admissible,
                            build_afa_instance, make_solver, run_attack, simulate_faults,
                            suffix_digest)
from cdclcrypto.encoder import reference as ref
from cdclcrypto.solver import Status


def _instance(rounds=3, round=0, count=16, seed=3, **kw):
    spec = FaultSpec(rounds=rounds, round=round, count=count, **kw)
    run = simulate_faults(None, spec, seed)
    return spec, run, build_afa_instance(spec, run.correct, run.faulty, seed)


def _fix_secret(s, inst, secret, skip=()):
    names = [f"S[{r}]" for r in ("ABCDEFGH" if inst.spec.function == "sha256" else "ABCDE")]
    vals = list(secret.state)
    for t in inst.spec.secret_words:
        names.append(f"W[{t}]")
        vals.append(secret.words[t])
    free = []
    for name, v in zip(names, vals):
        for i, lit in enumerate(inst.varmap[name]):
            if (name, i) in skip:
                free.append(lit)
            else:
                s.add_clause([lit if v >> i & 1 else -lit])
    return free


def test_spec_defaults():
    spec = FaultSpec()
    assert (spec.rounds, spec.round, spec.target, spec.count) == (64, 56, "E", 16)
    assert FaultSpec(function="sha1").target == "A"
    assert spec.secret_words == list(range(57, 64))
    assert FaultSpec(target="H").secret_words == list(range(56, 64))


@pytest.mark.parametrize("kw", [dict(function="md5"), dict(rounds=0), dict(rounds=10, round=10),
                                dict(target="Z"), dict(width=0), dict(width=33), dict(count=-1),
                                dict(function="sha1", target="F")])
def test_spec_rejects(kw):
    with pytest.raises(ValueError):
        FaultSpec(**kw)


@pytest.mark.parametrize("fn", ["sha256", "sha1"])
def test_zero_delta_hook(fn):
    spec = FaultSpec(function=fn, count=4)
    run = simulate_faults(None, spec, 5, zero_delta=True)
    assert run.deltas == [0] * 4
    assert all(f == run.correct for f in run.faulty)


def test_correct_digest_matches_reference():
    spec = FaultSpec(function="sha1", rounds=40, count=2)
    msg = list(range(16))
    run = simulate_faults(msg, spec, 0)
    assert run.correct == ref.compress("sha1", msg, None, 40)


def test_distinct_seeds_give_distinct_deltas():
    spec = FaultSpec(count=2)
    a = simulate_faults([0] * 16, spec, 1).deltas
    b = simulate_faults([0] * 16, spec, 2).deltas
    assert a != b
    assert all(0 < d < 1 << 32 for d in a + b)


def test_narrow_width_bounds_deltas():
    spec = FaultSpec(width=4, count=50)
    run = simulate_faults(None, spec, 0)
    assert all(1 <= d < 16 for d in run.deltas)


@pytest.mark.parametrize("target", ["E", "A", "H", "W"])
def test_final_round_fault_changes_digest(target):
    spec = FaultSpec(rounds=64, round=63, target=target, count=3)
    run = simulate_faults(None, spec, 9)
    assert all(f != run.correct for f in run.faulty)


def test_suffix_digest_roundtrip_through_secret():
    spec, run, inst = _instance()
    assert suffix_digest(spec, run.secret.state, run.secret.words) == run.correct
    assert admissible(inst, run.secret, run.deltas)
    wrong = list(run.deltas)
    wrong[0] ^= 1
    assert not admissible(inst, run.secret, wrong)


def test_zero_faults_is_suffix_preimage():
    spec, run, inst = _instance(count=0)
    assert inst.faulty == []
    assert not any(n.startswith("delta") for n in inst.varmap)
    r = make_solver(inst).solve()
    assert r.status is Status.SAT


def test_variable_count_grows_linearly():
    sizes = [_instance(rounds=8, round=4, count=n)[2].num_vars for n in range(4)]
    steps = {b - a for a, b in zip(sizes, sizes[1:])}
    assert len(steps) == 1 and steps.pop() > 0


def test_build_rejects_mismatched_digest_count():
    spec, run, _ = _instance(count=2)
    with pytest.raises(ValueError):
        build_afa_instance(spec, run.correct, run.faulty[:1])


def test_ground_truth_units_extract_simulated_deltas():
    spec, run, inst = _instance(rounds=12, round=8, count=4)
    s = make_solver(inst)
    _fix_secret(s, inst, run.secret)
    r = s.solve()
    assert r.status is Status.SAT
    got = [sum(1 << i for i, b in enumerate(inst.delta_bits(k)) if r.lit_true(b))
           for k in range(spec.count)]
    assert got == run.deltas


def test_recovery_confirmed_and_plugin_independent():
    spec, run, inst = _instance()
    on = run_attack(inst, ("adder", "hashcheck"), check_unique=True)
    off = run_attack(inst, (), check_unique=True)
    assert on.verdict == off.verdict == CONFIRMED
    assert on.secret == off.secret == run.secret
    assert on.deltas == run.deltas
    gt = run_attack(inst, (), ground_truth=run.secret)
    assert gt.verdict == CONFIRMED


def test_single_fault_is_only_admissible():
    spec, run, inst = _instance(rounds=2, count=1)
    r = run_attack(inst, check_unique=True)
    assert r.status is Status.SAT
    assert r.verdict == ADMISSIBLE
    assert admissible(inst, r.secret, r.deltas)


def _admissible_set(n, free):
    spec, run, inst = _instance(rounds=2, count=n, seed=1)
    s = make_solver(inst, ("adder",))
    lits = sorted(_fix_secret(s, inst, run.secret, free))
    sols = set()
    while True:
        r = s.solve()
        if r.status is not Status.SAT:
            return sols
        key = tuple(l if r.lit_true(l) else -l for l in lits)
        sols.add(key)
        s.add_clause([-l for l in key])


def test_admissible_set_shrinks_with_more_faults():
    # 16 unknown bits; H1 + W1 is all the digest pins down without faults
    free = {("S[G]", i) for i in range(8)} | {("W[1]", i) for i in range(8)}
    sets = [_admissible_set(n, free) for n in range(4)]
    for a, b in zip(sets, sets[1:]):
        assert b <= a
    assert len(sets[0]) > len(sets[-1]) >= 1


def test_save_is_deterministic_and_loads(tmp_path):
    _, run, inst = _instance(count=2)
    _, _, again = _instance(count=2)
    p1 = inst.save(tmp_path / "a")
    p2 = again.save(tmp_path / "b")
    for x, y in zip(p1, p2):
        assert x.read_bytes() == y.read_bytes()
    back = AfaInstance.load(tmp_path / "a")
    assert back.spec == inst.spec
    assert back.clauses == inst.clauses and back.num_vars == inst.num_vars
    assert back.correct == inst.correct and back.faulty == inst.faulty
    assert [g.operands for g in back.adders] == [g.operands for g in inst.adders]
    r, orig = run_attack(back), run_attack(inst)
    assert (r.secret, r.deltas, r.stats["conflicts"]) == (orig.secret, orig.deltas, orig.stats["conflicts"])
    assert admissible(back, r.secret, r.deltas)
