"""How confidently can a crowd order items as the task gets harder?

Generates synthetic crowd rankings at four difficulty levels, fits a Normal
RUM per level, and prints the probability that each truly better item is
ranked above its neighbour.
"""
import numpy as np

from rankagg import MCEMConfig, SynthConfig, difficulty_sweep, synth_generate

for style in ("puzzle", "dots"):
    cfg = SynthConfig(domain_style=style, seed=4)
    levels = synth_generate(cfg)
    print(f"\n{style}: {len(levels)} levels x {levels[0].data.n} rankings, gaps {np.round(cfg.gaps(), 2)}")
    sweep = difficulty_sweep([(lvl.label, lvl.data) for lvl in levels], "normal",
                             truth=levels[0].truth, draws=1000, mcem=MCEMConfig(max_em_iters=40))
    lines = sweep.adjacent_prob_lines
    for label, line in zip(sweep.labels, lines):
        bar = "#" * int(round(40 * (line.mean() - 0.5)))
        print(f"  {label:8s}", " ".join(f"{x:.3f}" for x in line), " ", bar)
    # harder levels push every adjacent pair toward a coin flip
    print("  mean by level:", np.round(lines.mean(axis=1), 3))
