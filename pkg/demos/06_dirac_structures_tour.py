# A tour of the Dirac-structure toolbox
# -------------------------------------
#
# Kernel and image representations describe the same power-preserving
# subspace; conversions are transposes.  When the state-flow block F_s is
# rank deficient, part of the state derivative is annihilated by the
# structure: those directions never need to be differentiable, and the
# orthogonal split below separates them from the co-energy directions.

import numpy as np

import phs_kit as pk

rng = np.random.default_rng(0)

# build a structure as the graph of a random skew map, f = J e
j = rng.standard_normal((4, 4))
j = j - j.T
rep = pk.DiracKernelRep(F=np.eye(4), G=-j, n_s=3, n_r=0, n_p=1)
print("validation:", pk.validate_kernel(rep).as_dict())

img = pk.kernel_to_image(rep)
phi = rng.standard_normal(4)
member = pk.BondVector(img.K @ phi, img.L @ phi)
print("image-parameterized member distance:", pk.distance_to_structure(rep, member))
print("pairing of a member with itself (power conservation):",
      pk.pairing(member, member))

# a structure with a genuinely rank-deficient state-flow block
f_mat = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
])
g_mat = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
])
rep = pk.DiracKernelRep(F=f_mat, G=g_mat, n_s=4)
print("\nconstrained structure valid:", pk.validate_kernel(rep).passed)

split = pk.extrapolation_split(rep)
print("co-energy directions:", split.rank, "of", split.n_s)
print("annihilated state directions:", split.kernel_dim)
x = rng.standard_normal(4)
print("reconstruction error:",
      np.linalg.norm(split.projector_kernel @ x + split.projector_coenergy @ x - x))

d0 = pk.substructure_D0(rep)
print("dim D0 =", d0.shape[1], " (n - rank F_s =", rep.n - np.linalg.matrix_rank(rep.F_s), ")")
