"""
The crossing simulator on its own
=================================

One run of the moderate-flow scenario: seeded Poisson arrivals from both
ends, a train every five minutes, the gate closing around each passage, and
queued vehicles restarting at the configured discharge rate.  The exported
trace carries everything the offline verifier needs.
"""

from dataclasses import replace

import redapt
from redapt.hrcs import ScenarioConfig, compute_metrics, simulate, trace_to_csv

cfg = ScenarioConfig.from_json(redapt.data_path("experiment1.json").read_text())
print(f"scenario: {cfg.lambda_north:g}/{cfg.lambda_south:g} veh/min, "
      f"dispatch every {cfg.t_dispatch_min:g} min, {cfg.duration_min:g} min run")

trace = simulate(cfg)
metrics = compute_metrics(trace, cfg)
print(f"\ncrossing-time percentages: north {metrics.p_north:.2%}, south {metrics.p_south:.2%}")
print(f"occupancy peak: {metrics.n_peak} vehicles (limit {cfg.n_limit})")
print(f"mean flow: north {metrics.mean_f_north:.1f}, south {metrics.mean_f_south:.1f} veh/min")

# a taste of the exported trace
lines = trace_to_csv(trace).splitlines()
print("\ntrace.csv header and two rows:")
for line in (lines[0], lines[1], lines[601]):
    print(" ", line[:110] + ("..." if len(line) > 110 else ""))

# determinism: the same configuration always produces the same bytes
again = trace_to_csv(simulate(cfg))
print("\nsame seed, same bytes:", again == trace_to_csv(trace))

# raising the dispatch interval only helps traffic
print("\ndispatch interval sweep (fixed seed):")
for dispatch in (3.0, 5.0, 7.0):
    swept = replace(cfg, t_dispatch_min=dispatch, duration_min=120.0)
    m = compute_metrics(simulate(swept), swept)
    print(f"  every {dispatch:g} min -> worst p {min(m.p_north, m.p_south):.2%}, peak n {m.n_peak}")
