"""Decode sampled errors and compare against coset enumeration."""

import numpy as np

from cssmaxsat.codes import gen_color_666, gen_toric
from cssmaxsat.decoder import decode_sector, exhaustive_decode, run_trial
from cssmaxsat.noise import depolarizing_for_code

rng = np.random.default_rng(2)
code = gen_color_666(5)
for _ in range(5):
    e = (rng.random(code.n) < 0.06).astype(np.uint8)
    s = code.hz @ e
    res = decode_sector(code.hz, s, 0.06)
    _, best = exhaustive_decode(code.hz, s, 0.06)
    print(f"weight {e.sum()} error -> weight {res.e_dec.sum()} correction, objective {res.objective:.4f} (enumeration {best:.4f})")

# whole trials: both sectors, judged on the residual
toric = gen_toric(5)
noise = depolarizing_for_code(toric, 0.1)
fails = sum(run_trial(toric, noise, seed=0, key=(i,), engine="rc2").failed for i in range(300))
print(f"toric d=5, p=0.1: {fails}/300 logical failures")

# measurement noise over d rounds
noise = depolarizing_for_code(toric, 0.03, 0.03)
out = run_trial(toric, noise, L=5, seed=1, key=(0,), engine="rc2")
print("L=5 trial failed:", out.failed, "seconds:", round(out.seconds, 3))
