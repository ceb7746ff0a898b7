"""
The specification language: parse, check, print, evaluate
=========================================================

Goals, softgoals, MAPE tasks and uncertainty sources are written as entity
blocks whose condition slots hold temporal-logic formulas.  Formulas are
evaluated over finite traces with three-valued verdicts: a witness makes F
satisfied, a counterexample makes G violated, and everything else stays
inconclusive until more of the execution is seen.
"""

import redapt
from redapt.speclang import (
    State,
    Trace,
    check_wellformed,
    evaluate,
    parse_formula,
    print_entity,
)

# the bundled crossing-control document
doc = redapt.load_bundled_spec()
print(f"parsed {len(doc.entities)} entities; diagnostics: {check_wellformed(doc)}\n")

# the dispatch goal, re-emitted in canonical form
dispatch_goal = doc.by_name("Determine t_dispatch to make p > 50% and n < 350")
print(print_entity(dispatch_goal))

# evaluating its invariant over a short monitored trace
invariant = dispatch_goal.invariant
print("\ninvariant:", invariant)


def monitored(*rows):
    return Trace(tuple(State(time=float(i), values=v) for i, v in enumerate(rows)))


healthy = monitored({"p": 0.8, "n": 120}, {"p": 0.85, "n": 150})
congested = monitored({"p": 0.8, "n": 120}, {"p": 0.39, "n": 380})

print("healthy trace   ->", evaluate(invariant, healthy).value)    # inconclusive: G never closes
print("congested trace ->", evaluate(invariant, congested).value)  # violated: counterexample seen

# percent literals scale to fractions, and F doubles as variable and operator
formula = parse_formula("F(p(td, F) >= 50%)")
print("\nparsed:", formula)
