"""
When does the fine stage run?
=============================

A Doppler that holds still gives a flat radar history and the receiver
settles on the radar estimate alone.  A sudden jump shows up in the history
variance and brings the preamble stage back for as long as the jump sits in
the window.
"""

from isac_dfs import OfdmConfig, RngStream
from isac_dfs.adaptive import AdaptiveState, process_frame
from isac_dfs.channel import ChannelConfig
from isac_dfs.harness import simulate_frame

cfg = OfdmConfig()
schedule = [0.15] * 12 + [0.25] * 12

state = AdaptiveState()
marks = []
for f, eps in enumerate(schedule):
    fr = simulate_frame(cfg, ChannelConfig(), eps, 20.0, RngStream(5, f).generator())
    _, rec, state = process_frame(fr.rx, state, cfg, fr.burst, eps_true=eps)
    marks.append("F" if rec.mode.value == "CoarseAndFine" else ".")
    if f in (0, 11, 12, 19, 20):
        print(f"frame {f:2d}: eps {eps:.2f}  estimate {rec.eps_total:.4f}  {rec.mode.value}")

print("mode per frame (F = fine stage ran):", "".join(marks))
print(f"fine stage ran on {state.fine_calls} of {state.frames} frames")
