"""
The monomial dictionary baseline
================================

With degree-2 monomials the Lorenz-96 right-hand side lies in the span of
the dictionary, so sparse regression recovers it from noiseless data.
"""
import numpy as np

from aglnet import dictionary as dct
from aglnet.datagen import NoiseSpec, make_dataset, target_from_id
from aglnet.dynamics import OdeConfig, integrate
from aglnet.selection import PathPoint, reduce_path

traj = integrate(OdeConfig())
train = make_dataset(traj, target_from_id("lorenz_rhs_25"), NoiseSpec(0.0, 0.0, 0))
dic = dct.build_dictionary(train.X, degree=2)
print("dictionary terms:", dic.n_terms)

points = {}
for lam in np.logspace(-1, -4, 4):
    sc = dct.sparse_solve(dic, train.y, lam, n_iter=3000)
    points[lam] = PathPoint(sc.train_mse, sc.n_active, sc.support, sc)
    print(f"lam={lam:.0e}  terms={sc.n_active:3d}  mse={sc.train_mse:.2e}")

best = reduce_path(points, train.m).chosen.payload
doc = dct.coefficients_to_dict(best, dic, train.scales)
for term in doc["terms"]:
    print(f"{term['name']:>8}  {term['coef_original']: .6f}")
