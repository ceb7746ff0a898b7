import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_eval import reference_verdict
from redapt.speclang import (
    And,
    Atom,
    Cmp,
    EvaluationError,
    Eventually,
    Forall,
    Globally,
    Implies,
    InfiniteDomainError,
    Instance,
    Next,
    Not,
    Or,
    State,
    Trace,
    UnboundVariableError,
    Until,
    Var,
    Verdict,
    evaluate,
    kleene_and,
    kleene_not,
    kleene_or,
    parse_formula,
)

SAT, VIOL, INC = Verdict.SAT, Verdict.VIOL, Verdict.INCONCLUSIVE


def trace_of(*value_maps, instances=None):
    return Trace(
        tuple(
            State(time=float(i), values=v, instances=instances or {})
            for i, v in enumerate(value_maps)
        )
    )


class TestTemporalBasics:
    def test_globally_refuted_by_counterexample(self):
        trace = trace_of({"n": 100}, {"n": 200}, {"n": 400})
        assert evaluate(parse_formula("G(n <= 350)"), trace) is VIOL

    def test_globally_without_counterexample_is_inconclusive(self):
        trace = trace_of({"n": 100}, {"n": 200})
        assert evaluate(parse_formula("G(n <= 350)"), trace) is INC

    def test_eventually_satisfied_by_witness(self):
        trace = trace_of({"sat": False}, {"sat": False}, {"sat": True})
        assert evaluate(parse_formula("F(sat = true)"), trace) is SAT

    def test_eventually_without_witness_is_inconclusive(self):
        trace = trace_of({"sat": False}, {"sat": False})
        assert evaluate(parse_formula("F(sat = true)"), trace) is INC

    def test_next_at_last_position_is_inconclusive(self):
        trace = trace_of({"x": 1}, {"x": 2})
        assert evaluate(parse_formula("X(x = 2)"), trace, position=1) is INC
        assert evaluate(parse_formula("X(x = 2)"), trace, position=0) is SAT

    def test_until_satisfied(self):
        trace = trace_of({"a": True, "b": False}, {"a": True, "b": True})
        assert evaluate(parse_formula("a U b"), trace) is SAT

    def test_until_violated_when_lhs_fails_first(self):
        trace = trace_of({"a": False, "b": False}, {"a": True, "b": True})
        assert evaluate(parse_formula("a U b"), trace) is VIOL

    def test_until_open_is_inconclusive(self):
        trace = trace_of({"a": True, "b": False}, {"a": True, "b": False})
        assert evaluate(parse_formula("a U b"), trace) is INC


class TestAbsentValues:
    def test_absent_equals_empty_string(self):
        trace = trace_of({"f_3": None})
        assert evaluate(parse_formula('f_3 = ""'), trace) is SAT

    def test_absent_differs_from_number(self):
        trace = trace_of({"f_3": None})
        assert evaluate(parse_formula("f_3 = 5"), trace) is VIOL
        assert evaluate(parse_formula("f_3 != 5"), trace) is SAT

    def test_absent_cannot_be_ordered(self):
        trace = trace_of({"f_3": None})
        assert evaluate(parse_formula("f_3 < 5"), trace) is VIOL
        assert evaluate(parse_formula("f_3 >= 5"), trace) is VIOL

    def test_present_value_not_empty(self):
        trace = trace_of({"f_3": 14.0})
        assert evaluate(parse_formula('f_3 = ""'), trace) is VIOL


class TestKleeneTables:
    def test_connective_helpers(self):
        assert kleene_and(INC, VIOL) is VIOL
        assert kleene_and(INC, SAT) is INC
        assert kleene_or(INC, SAT) is SAT
        assert kleene_or(INC, VIOL) is INC
        assert kleene_not(INC) is INC

    def test_through_formulas(self):
        # X(...) at the last state is inconclusive; pair it with definite sides
        trace = trace_of({"x": 1})
        inconclusive = parse_formula("X(x = 1)")
        false_side = parse_formula("x = 2")
        true_side = parse_formula("x = 1")
        assert evaluate(And(inconclusive, false_side), trace) is VIOL
        assert evaluate(Or(inconclusive, true_side), trace) is SAT
        assert evaluate(And(inconclusive, true_side), trace) is INC


class TestQuantifiers:
    def sensors(self, **values):
        return {
            "I_sensor": {
                name: Instance(id=name, value=v, gauge=v is not None)
                for name, v in values.items()
            }
        }

    def test_exists_failed_sensor(self):
        trace = trace_of({}, instances=self.sensors(ir_01=15.0, ir_02=None))
        formula = parse_formula('exists s in I_sensor . s.value = ""')
        assert evaluate(formula, trace) is SAT

    def test_exists_no_failed_sensor(self):
        trace = trace_of({}, instances=self.sensors(ir_01=15.0, ir_02=14.0))
        formula = parse_formula('exists s in I_sensor . s.value = ""')
        assert evaluate(formula, trace) is VIOL

    def test_forall_matches_conjunction_expansion(self):
        trace = trace_of({}, instances=self.sensors(a=15.0, b=None, c=12.0))
        body = parse_formula('x.value != ""')
        quantified = Forall("x", "I_sensor", body)
        members = sorted(trace.states[0].instances["I_sensor"])
        expanded = None
        for name in members:
            conjunct = parse_formula(f'{name}_value != ""')
            expanded = conjunct if expanded is None else And(expanded, conjunct)
        flat = trace_of(
            {f"{k}_value": v.value for k, v in trace.states[0].instances["I_sensor"].items()}
        )
        assert evaluate(quantified, trace) is evaluate(expanded, flat)

    def test_numeric_domain(self):
        trace = trace_of({"n": 10})
        formula = parse_formula("exists k in options . n = k")
        assert evaluate(formula, trace, domains={"options": [5, 10]}) is SAT

    def test_empty_domains_are_vacuous(self):
        trace = trace_of({"n": 10})
        assert evaluate(Forall("k", "d", Cmp("=", Var("n"), Var("k"))), trace, domains={"d": []}) is SAT
        assert evaluate(parse_formula("exists k in d . n = k"), trace, domains={"d": []}) is VIOL

    def test_unknown_domain_raises(self):
        trace = trace_of({"n": 10})
        with pytest.raises(InfiniteDomainError):
            evaluate(parse_formula("exists k in nowhere . n = k"), trace)


class TestErrors:
    def test_unbound_variable(self):
        with pytest.raises(UnboundVariableError):
            evaluate(parse_formula("missing = 1"), trace_of({"x": 1}))

    def test_uninterpreted_function(self):
        with pytest.raises(UnboundVariableError):
            evaluate(parse_formula("p(x, y) >= 1"), trace_of({"x": 1, "y": 2}))

    def test_empty_trace(self):
        with pytest.raises(EvaluationError):
            evaluate(parse_formula("x = 1"), Trace(()))

    def test_position_out_of_range(self):
        with pytest.raises(EvaluationError):
            evaluate(parse_formula("x = 1"), trace_of({"x": 1}), position=3)


# -- cross-checks against the independent reference evaluator ----------------


def _bool_states(bits):
    return [{"p": bool(b & 1), "q": bool(b & 2)} for b in bits]


def _mini_formulas():
    """All formulas of height <= 2 over {p, q} with a compact operator set."""
    atoms = [Atom(Var("p")), Atom(Var("q"))]
    height2 = []
    for f in atoms:
        height2 += [Not(f), Next(f), Eventually(f), Globally(f)]
    for f, g in itertools.product(atoms, repeat=2):
        height2 += [And(f, g), Or(f, g), Implies(f, g), Until(f, g)]
    return atoms + height2


def test_exhaustive_mini_oracle_equivalence():
    formulas = _mini_formulas()
    for length in range(1, 5):
        for bits in itertools.product(range(4), repeat=length):
            states = _bool_states(bits)
            trace = trace_of(*states)
            for formula in formulas:
                assert evaluate(formula, trace) is reference_verdict(formula, trace.states)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_duality_of_globally_and_eventually(data):
    from formula_gen import random_formula
    import random as _random

    rng = _random.Random(data.draw(st.integers(0, 2**32 - 1)))
    bits = data.draw(st.lists(st.integers(0, 3), min_size=1, max_size=6))
    trace = trace_of(*_bool_states(bits))
    body = _project_boolean(random_formula(rng, 2))
    left = evaluate(Not(Globally(body)), trace)
    right = evaluate(Eventually(Not(body)), trace)
    assert left is right


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_definitive_verdicts_stable_under_extension(data):
    from formula_gen import random_formula
    import random as _random

    rng = _random.Random(data.draw(st.integers(0, 2**32 - 1)))
    prefix_bits = data.draw(st.lists(st.integers(0, 3), min_size=1, max_size=4))
    extension_bits = data.draw(st.lists(st.integers(0, 3), min_size=1, max_size=4))
    formula = _project_boolean(random_formula(rng, 3))
    prefix = trace_of(*_bool_states(prefix_bits))
    full = trace_of(*_bool_states(prefix_bits + extension_bits))
    before = evaluate(formula, prefix)
    if before is not INC:
        assert evaluate(formula, full) is before


def _project_boolean(formula):
    """Rewrite generated formulas onto the two boolean state variables."""
    from redapt.speclang import Exists, Func

    Impl = Implies

    def fix_term(term):
        if isinstance(term, (Func,)):
            return Var("p")
        if isinstance(term, Var):
            return Var("p" if hash(term.name) % 2 else "q")
        return term

    def walk(node):
        if isinstance(node, Atom):
            return Atom(fix_term(node.term))
        if isinstance(node, Cmp):
            return Atom(fix_term(node.lhs))
        if isinstance(node, Not):
            return Not(walk(node.operand))
        if isinstance(node, Next):
            return Next(walk(node.operand))
        if isinstance(node, Eventually):
            return Eventually(walk(node.operand))
        if isinstance(node, Globally):
            return Globally(walk(node.operand))
        if isinstance(node, And):
            return And(walk(node.lhs), walk(node.rhs))
        if isinstance(node, Or):
            return Or(walk(node.lhs), walk(node.rhs))
        if isinstance(node, Impl):
            return Impl(walk(node.lhs), walk(node.rhs))
        if isinstance(node, Until):
            return Until(walk(node.lhs), walk(node.rhs))
        if isinstance(node, (Forall, Exists)):
            return walk(node.body)
        return Atom(Var("p"))

    return walk(formula)
