"""Build the three code families and look at their structure."""

import numpy as np

from cssmaxsat import codes

for family in sorted(codes.GENERATORS):
    code = codes.generate(family, 5)
    print(code, "X checks:", code.hx.num_rows, "Z checks:", code.hz.num_rows)
    print("  check weights", sorted(set(code.hx.row_weights() + code.hz.row_weights())))
    print("  all invariants hold:", codes.validate_css(code).ok)

# the d=3 color code is the Steane code
steane = codes.gen_color_666(3)
print(steane.hz.dense)
print("logical X:", steane.lx.dense, "logical Z:", steane.lz.dense)

# a weight-3 logical survives every check; brute force confirms the distance
print("min X logical weight:", codes.min_logical_weight(steane, "x"))

# residuals: a stabilizer is harmless, a logical is a failure
zero = np.zeros(steane.n, dtype=np.uint8)
print(codes.logical_failure(steane, steane.hz.dense[0], zero))  # False
print(codes.logical_failure(steane, steane.lx.dense[0], zero))  # True

print(codes.dumps_code(codes.gen_rotated_surface(3)))
