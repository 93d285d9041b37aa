"""Clause-to-variable ratios against the random 3-SAT transition at 4.2."""

from cssmaxsat import encoder
from cssmaxsat.codes import GENERATORS, gen_color_666

for family, gen in sorted(GENERATORS.items()):
    for d in (3, 7, 11):
        h = gen(d).hz
        one = encoder.clause_density(h, "actual", L=1).alpha
        many = encoder.clause_density(h, "actual", L=d).alpha
        print(f"{family:16s} d={d:2d}  L=1 {one:.3f}  L=d {many:.3f}")

# closed forms for the color code approach their large-d limits slowly
for d in (11, 31, 51):
    rep = encoder.clause_density(gen_color_666(d).hz, "hard-analytic")
    print(f"color d={d}: hard {rep.alpha_hard:.3f}, MaxSAT {rep.alpha_maxsat:.3f}, spacetime MaxSAT (L=1) {rep.spacetime_alpha_maxsat:.3f}")
print("critical density", encoder.ALPHA_CRITICAL)
