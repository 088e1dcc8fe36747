import pytest

from respcheck import (
    EvaluationError,
    PlanPattern,
    car_languages,
    ccr_languages,
    ccr_witness,
    check_car,
    check_ccr,
    check_cpr,
    cpr_languages,
    enumerate_histories,
    parse_history_formula,
    parse_plan,
    trace_of,
)
from respcheck.modelfile import parse_model

FINE = "(!cooperative1 & !cooperative2)"
REWARD = "(cooperative1 & cooperative2)"
PAYOFF2 = "(!cooperative1 & cooperative2)"

AVOIDABLE = f"X ({FINE} | {PAYOFF2})"


def test_car_holds_for_defecting_agent(cpd_uniform):
    psi = parse_history_formula(AVOIDABLE, cpd_uniform)
    assert check_car(cpd_uniform, "s0", "A1", parse_plan("(d,d)", cpd_uniform), psi)


def test_car_fails_for_cooperative_plan(cpd_uniform):
    psi = parse_history_formula(AVOIDABLE, cpd_uniform)
    assert not check_car(cpd_uniform, "s0", "A1", parse_plan("(c,c)", cpd_uniform), psi)


def test_car_fails_for_tautological_outcome(cpd_uniform):
    psi = parse_history_formula("X true", cpd_uniform)
    assert not check_car(cpd_uniform, "s0", "A1", parse_plan("(d,d)", cpd_uniform), psi)


def test_cpr_holds_for_cooperating_agent(cpd_uniform):
    psi = parse_history_formula(f"X {REWARD}", cpd_uniform)
    assert check_cpr(cpd_uniform, "s0", "A1", parse_plan("(c,c)", cpd_uniform), psi)


def test_cpr_fails_when_plan_misses_outcome(cpd_uniform):
    psi = parse_history_formula(f"X {REWARD}", cpd_uniform)
    assert not check_cpr(cpd_uniform, "s0", "A1", parse_plan("(d,c)", cpd_uniform), psi)


def test_cpr_fails_for_tautological_outcome(cpd_uniform):
    psi = parse_history_formula("X true", cpd_uniform)
    assert not check_cpr(cpd_uniform, "s0", "A1", parse_plan("(c,c)", cpd_uniform), psi)


def test_ccr_two_step_plan_with_witness(cpd_uniform):
    psi = parse_history_formula(f"F<=2 {FINE}", cpd_uniform)
    plan = parse_plan("(c,d);(d,d)", cpd_uniform)
    assert ccr_witness(cpd_uniform, "s0", "A1", plan, psi) == frozenset({"A1", "A2"})
    assert check_ccr(cpd_uniform, "s0", "A1", plan, psi)


def test_ccr_false_when_plan_violates_outcome(cpd_uniform):
    psi = parse_history_formula(f"F<=2 {REWARD}", cpd_uniform)
    plan = parse_plan("(c,d);(d,d)", cpd_uniform)
    assert not check_ccr(cpd_uniform, "s0", "A1", plan, psi)


def test_ccr_false_for_powerless_agent():
    # B's action never affects the transition, so B cannot contribute.
    G = parse_model(
        """
        agents A B
        actions x y
        props p
        state s {}
        state u {p}
        trans s (x,x) -> u : 1
        trans s (x,y) -> u : 1
        trans s (y,x) -> s : 1
        trans s (y,y) -> s : 1
        trans u (x,x) -> u : 1
        trans u (x,y) -> u : 1
        trans u (y,x) -> s : 1
        trans u (y,y) -> s : 1
        """
    )
    psi = parse_history_formula("X p", G)
    plan = PlanPattern.from_steps(["A", "B"], [{"A": "x", "B": "x"}])
    assert not check_ccr(G, "s", "B", plan, psi)
    assert check_ccr(G, "s", "A", plan, psi)


def test_checks_reject_agent_outside_plan(cpd_uniform):
    psi = parse_history_formula(f"X {REWARD}", cpd_uniform)
    plan = parse_plan("(A1:c,*)", cpd_uniform)
    with pytest.raises(EvaluationError):
        check_car(cpd_uniform, "s0", "A2", plan, psi)


def test_car_languages_one_round(cpd_uniform):
    psi = parse_history_formula(AVOIDABLE, cpd_uniform)
    langs = car_languages(cpd_uniform, "s0", "A1", parse_plan("(d,c)", cpd_uniform), psi)
    assert sorted(str(trace_of(w)) for w in langs.positive.words) == ["(d,c)", "(d,d)"]
    assert sorted(str(trace_of(w)) for w in langs.negative.words) == ["(c,c)", "(c,d)"]
    assert langs.kappa == 1


def test_car_languages_tautology_gates_to_zero(cpd_uniform):
    psi = parse_history_formula("X true", cpd_uniform)
    langs = car_languages(cpd_uniform, "s0", "A1", parse_plan("(d,d)", cpd_uniform), psi)
    assert langs.negative.cardinality == 0
    assert langs.kappa == 0


def test_cpr_languages_wildcard_counts(cpd_uniform):
    # deviation language of the anchored cooperate plan grows as 3^(t-1)
    for t in (2, 3):
        psi = parse_history_formula(f"F<={t} {REWARD}", cpd_uniform)
        langs = cpr_languages(
            cpd_uniform, "s0", "A1", parse_plan("...;(c,c)", cpd_uniform), psi
        )
        assert langs.negative.cardinality == 3 ** (t - 1)
        assert langs.kappa == 1


def test_cpr_positive_contains_plan_histories(cpd_uniform):
    psi = parse_history_formula(f"X {REWARD}", cpd_uniform)
    plan = parse_plan("(c,c)", cpd_uniform)
    langs = cpr_languages(cpd_uniform, "s0", "A1", plan, psi)
    own = {str(trace_of(w)) for w in langs.positive.words}
    assert "(c,c)" in own


def test_ccr_languages_per_coalition(cpd_uniform):
    psi = parse_history_formula(f"G<=2 ({FINE} | {REWARD})", cpd_uniform)
    plan = parse_plan("cycle@2: (c,c);(d,d)", cpd_uniform)
    per_j = ccr_languages(cpd_uniform, "s0", "A1", plan, psi)
    assert [sorted(l.coalition) for l in per_j] == [["A1"], ["A1", "A2"]]
    for lang in per_j:
        assert lang.positive.cardinality == 1
        assert lang.kappa == 1


def test_languages_are_subsets_of_all_histories(cpd_uniform):
    psi = parse_history_formula(f"F<=2 {REWARD}", cpd_uniform)
    langs = car_languages(
        cpd_uniform, "s0", "A1", parse_plan("...;(c,c)", cpd_uniform), psi
    )
    everything = set(enumerate_histories(cpd_uniform, "s0", 2))
    assert langs.positive.words <= everything
    assert langs.negative.words <= everything


def test_check_car_consistent_with_languages(cpd_uniform):
    psi = parse_history_formula(AVOIDABLE, cpd_uniform)
    for plan_text in ("(d,d)", "(d,c)", "(c,c)", "(c,d)"):
        plan = parse_plan(plan_text, cpd_uniform)
        langs = car_languages(cpd_uniform, "s0", "A1", plan, psi)
        from respcheck.model import plan_class, histories_of_plan

        class_size = sum(
            1
            for p in plan_class(cpd_uniform, "s0", plan, {"A1"}, 1)
            for _ in histories_of_plan(cpd_uniform, "s0", p)
        )
        covers = langs.positive.cardinality == class_size
        assert check_car(cpd_uniform, "s0", "A1", plan, psi) == (
            covers and langs.kappa == 1
        )
