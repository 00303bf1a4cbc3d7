"""
Averaged tensor moments
=======================

The proof controls E[Z_S1^2 ... Z_Sm^2] averaged over all choices of
subsets.  That average is computed exactly here and compared with its
bound, which only applies once the total degree is small against sqrt(n).
"""

from tensor_esd import MomentModel, c_moment, c_moment_bound, shared_degrees, tensor_moment
from tensor_esd.moments import shared_degree_moment_bound

model = MomentModel.three_point(3)
C = model.moment_constant()
print(f"{model}: moment constant C = {C:.3f}")

for m, n, dl in [(1, 6, (2,)), (2, 6, (1, 2)), (2, 8, (3, 3)), (2, 100, (1, 1)),
                 (2, 400, (1, 1))]:
    val = c_moment(m, n, dl, model)
    b = c_moment_bound(m, n, dl, C)
    note = f"bound {b.bound:.4f}" if b.applicable else "bound not applicable"
    print(f"m={m} n={n:3d} d={dl}: average moment {val:.6f}, {note}")

# a single tuple: overlap between non-paired subsets drives the moment up
gauss = MomentModel.gaussian()
tup = [(1, 2), (1, 2), (2, 3), (2, 3)]
print("\nsubsets", tup)
print("shared degrees", shared_degrees(tup).degrees)
print(f"moment {tensor_moment(gauss, tup)}, bound {shared_degree_moment_bound(gauss, tup)}")
