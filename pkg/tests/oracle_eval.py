"""Independent reference evaluator used to cross-check verdicts.

Deliberately written in a different style from the production evaluator:
verdicts are the integers -1/0/+1, connectives are arithmetic (min, max,
negation), and the temporal cases slice the trace instead of scanning with
an index.  Shares nothing with the implementation beyond the AST types.
"""

from __future__ import annotations

from redapt.speclang import (
    And,
    Atom,
    Cmp,
    Const,
    Eventually,
    Exists,
    Forall,
    Func,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Until,
    Var,
    Verdict,
)

TRUE, FALSE, MAYBE = 1, -1, 0

_TO_VERDICT = {TRUE: Verdict.SAT, FALSE: Verdict.VIOL, MAYBE: Verdict.INCONCLUSIVE}


def reference_verdict(formula, states, env=None, domains=None) -> Verdict:
    """Evaluate over a list of plain dict states (position 0)."""
    return _TO_VERDICT[_eval(formula, tuple(states), env or {}, domains or {})]


def _eval(f, states, env, domains) -> int:
    if isinstance(f, Atom):
        return _truth(_term(f.term, states[0], env))
    if isinstance(f, Cmp):
        return _cmp(f.op, _term(f.lhs, states[0], env), _term(f.rhs, states[0], env))
    if isinstance(f, Not):
        return -_eval(f.operand, states, env, domains)
    if isinstance(f, And):
        return min(_eval(f.lhs, states, env, domains), _eval(f.rhs, states, env, domains))
    if isinstance(f, Or):
        return max(_eval(f.lhs, states, env, domains), _eval(f.rhs, states, env, domains))
    if isinstance(f, Implies):
        return max(-_eval(f.lhs, states, env, domains), _eval(f.rhs, states, env, domains))
    if isinstance(f, Next):
        if len(states) < 2:
            return MAYBE
        return _eval(f.operand, states[1:], env, domains)
    if isinstance(f, Eventually):
        for k in range(len(states)):
            if _eval(f.operand, states[k:], env, domains) == TRUE:
                return TRUE
        return MAYBE
    if isinstance(f, Globally):
        for k in range(len(states)):
            if _eval(f.operand, states[k:], env, domains) == FALSE:
                return FALSE
        return MAYBE
    if isinstance(f, Until):
        # rhs || (lhs && X(until)), inconclusive past the end
        first_rhs = _eval(f.rhs, states, env, domains)
        if first_rhs == TRUE:
            return TRUE
        tail = MAYBE if len(states) < 2 else _eval(f, states[1:], env, domains)
        lhs = _eval(f.lhs, states, env, domains)
        return max(first_rhs, min(lhs, tail))
    if isinstance(f, (Forall, Exists)):
        members = _domain(f.domain, states[0], domains)
        verdicts = []
        for member in members:
            extended = dict(env)
            extended[f.var] = member
            verdicts.append(_eval(f.body, states, extended, domains))
        if isinstance(f, Forall):
            return min(verdicts, default=TRUE)
        return max(verdicts, default=FALSE)
    raise TypeError(f"oracle cannot evaluate {f!r}")


def _domain(name, state, domains):
    instances = getattr(state, "instances", None)
    if instances and name in instances:
        return [instances[name][k] for k in sorted(instances[name])]
    return list(domains[name])


def _term(t, state, env):
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Var):
        values = state.values if hasattr(state, "values") else state
        if t.name in values:
            return values[t.name]
        if t.name in env:
            return env[t.name]
        if "." in t.name:
            base, attr = t.name.split(".", 1)
            if base in env:
                return getattr(env[base], "field")(attr)
        raise KeyError(t.name)
    if isinstance(t, Func):
        raise KeyError(t.name)
    raise TypeError(f"oracle cannot evaluate term {t!r}")


def _truth(v) -> int:
    if v is None:
        return FALSE
    return TRUE if bool(v) else FALSE


def _cmp(op, a, b) -> int:
    a = "" if a is None else a
    b = "" if b is None else b
    if op in ("=", "!="):
        same_type = (
            (isinstance(a, bool) and isinstance(b, bool))
            or (isinstance(a, str) and isinstance(b, str))
            or (
                isinstance(a, (int, float))
                and isinstance(b, (int, float))
                and not isinstance(a, bool)
                and not isinstance(b, bool)
            )
        )
        eq = same_type and a == b
        if op == "=":
            return TRUE if eq else FALSE
        return FALSE if eq else TRUE
    for value in (a, b):
        if isinstance(value, (bool, str)):
            return FALSE
    table = {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}
    return TRUE if table[op] else FALSE
