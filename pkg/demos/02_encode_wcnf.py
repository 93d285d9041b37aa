"""Turn one syndrome into a weighted MaxSAT instance and inspect it."""

import numpy as np

from cssmaxsat import encoder, wcnf
from cssmaxsat.codes import gen_rotated_surface

code = gen_rotated_surface(3)
e = np.zeros(code.n, dtype=np.uint8)
e[4] = 1  # bit flip on the centre qubit
s = code.hz @ e
print("syndrome", s)

f = encoder.build_capacity_wcnf(code.hz, s, 0.1)
vm = f.var_map
print(f"{f.num_vars} variables: {vm.num_e} error bits, {vm.num_a} chain auxiliaries, {vm.num_b} padding")
print(f"{len(f.hard)} hard clauses, {len(f.soft)} soft clauses, density {f.density():.3f}")
print("every clause has three literals:", f.is_strict3())

# the compact mode drops padding; unit soft clauses and 2-literal chain ends
small = encoder.build_capacity_wcnf(code.hz, s, 0.1, encoder.EncoderOptions(strict3=False))
print("compact:", small.num_vars, "vars,", small.num_clauses, "clauses")

text = wcnf.dumps(encoder.quantize_weights(f, 10000), "wcnf2022")
print("\n".join(text.splitlines()[:6]))
print("...")

# several rounds of noisy measurement: the same chain over a larger matrix
diff = np.zeros(code.hz.num_rows * 3, dtype=np.uint8)
st = encoder.build_spacetime_wcnf(code.hz, diff, 0.05, 0.05, 3)
print("L=3:", st.num_vars, "vars,", st.num_clauses, "clauses, density", round(st.density(), 3))
