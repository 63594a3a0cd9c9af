"""
Hand-written gradients and the group soft-threshold
====================================================

The network's backward pass is checked against central differences, and the
proximal map of the group penalty is shown shrinking whole columns.
"""
import numpy as np

from aglnet.network import Architecture, backward, init_params, loss_mse
from aglnet.optimize import group_prox

arch = Architecture.standard(d=5, hidden=4, n_hidden=3)
params = init_params(arch, seed=0)
rng = np.random.default_rng(0)
X, y = rng.standard_normal((16, 5)), rng.standard_normal(16)

# %%
# Central differences on a handful of first-layer weights.
grads = backward(params, arch, X, y)
h = 1e-6
for (i, j) in [(0, 0), (1, 3), (3, 4)]:
    W = params.weights[0]
    old = W[i, j]
    W[i, j] = old + h
    up = loss_mse(params, arch, X, y)
    W[i, j] = old - h
    down = loss_mse(params, arch, X, y)
    W[i, j] = old
    print(f"dL/dW1[{i},{j}]  backprop {grads.weights[0][i, j]: .10f}   fd {(up - down) / (2 * h): .10f}")

# %%
# Group soft-thresholding: column norms drop by lam*gamma*w_j, or to zero.
W = np.array([[3.0, 0.3, 1.0], [4.0, 0.4, 0.0]])
weights = np.array([1.0, 1.0, 4.0])  # adaptive weights 1/||W~_j||^2
out = group_prox(W, weights, lam=2.0, gamma=1.0)
print("norms before", np.linalg.norm(W, axis=0), "after", np.linalg.norm(out, axis=0))
