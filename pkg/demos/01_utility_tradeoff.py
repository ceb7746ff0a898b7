"""
Gate-timing utilities and the safety/pass trade-off
===================================================

Under good light both gate intervals sit at their 4 s optimum and safety
utility is pinned at 1.  Once illuminance drops to 20 lx or below, the close
interval may shrink within (1, 4] and the open interval may grow within
[4, 7).  Every admissible retiming then moves along a straight Pareto
frontier: whatever safety gains, pass efficiency loses, one for one.
"""

import numpy as np

from redapt.hrcs import eval_utilities

# bright: timing is pinned and utilities are maximal
bright = eval_utilities(4.0, 4.0, illuminance=80.0)
print("bright, (4.0, 4.0):", bright)

# the moment the light goes, the same timing loses all safety utility
dark_at_optimum = eval_utilities(4.0, 4.0, illuminance=10.0)
print("dark,   (4.0, 4.0):", dark_at_optimum)

# walk the admissible retiming diagonal in 0.5 s steps
print("\nretiming path (close -0.5 s, open +0.5 s per step):")
t_close, t_open = 4.0, 4.0
for step in range(6):
    u = eval_utilities(t_close, t_open, illuminance=10.0)
    marker = " <- first above the 0.7 desired level" if u.u_safety >= 0.7 else ""
    print(f"  ({t_close:3.1f}, {t_open:3.1f})  safety={u.u_safety:.4f}  pass={u.u_pass:.4f}{marker}")
    t_close, t_open = t_close - 0.5, t_open + 0.5

# the frontier: ten thousand random admissible points never leave safety+pass=1
rng = np.random.default_rng(1)
closes = rng.uniform(1.0 + 1e-9, 4.0, size=10_000)
opens = rng.uniform(4.0, 7.0 - 1e-9, size=10_000)
gaps = [
    abs(eval_utilities(c, o, 10.0).u_safety + eval_utilities(c, o, 10.0).u_pass - 1.0)
    for c, o in zip(closes, opens)
]
print(f"\nPareto identity over 10k random retimings: max |safety + pass - 1| = {max(gaps):.2e}")
