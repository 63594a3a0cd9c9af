"""
Lorenz-96 trajectories and noisy regression data
================================================

Integrate the 40-variable system, then turn one of its equations into a
regression problem: inputs are the (noisy) states, the output is the
(noisy) right-hand side of equation 25.
"""
import numpy as np

from aglnet.datagen import NoiseSpec, make_dataset, make_test_set, target_from_id
from aglnet.dynamics import OdeConfig, integrate, lorenz96_rhs

# %%
# The uniform state F is an equilibrium; a small bump on x20 starts the chaos.
print("rhs at x = F:", np.abs(lorenz96_rhs(np.full(40, 8.0), 8.0)).max())

traj = integrate(OdeConfig())           # t in [0, 100], dt = 0.01
print("trajectory", traj.states.shape, "final |x| max", np.abs(traj.states[-1]).max().round(3))

# %%
# The target depends on x23, x24, x25, x26 only.
tf = target_from_id("lorenz_rhs_25")
print("active variables:", sorted(tf.active_set))

train = make_dataset(traj, tf, NoiseSpec(sigma_x=0.02, sigma_y=0.02, seed=0))
test = make_test_set(traj, tf, train.scales)
print("train", train.X.shape, "test", test.X.shape)

# noise amplitude is relative to the largest clean input
clean = traj.states[traj.window(0, 80)]
print("input noise std / (0.02 M_x):", np.std(train.raw_X - clean) / (0.02 * np.abs(clean).max()))

# standardized data has unit sample std per column, no centering
print("column std after scaling:", train.X.std(axis=0, ddof=1)[:4].round(6))

# %%
# Optional figure of the test window.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.plot(test.times, test.raw_y, lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("f(x(t))")
    fig.savefig("lorenz25_test_window.png", dpi=120, bbox_inches="tight")
    print("wrote lorenz25_test_window.png")
