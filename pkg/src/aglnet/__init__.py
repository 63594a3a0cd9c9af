"""Variable selection for neural-network regression with the adaptive group Lasso.

Modules
-------
dynamics     Lorenz-96 right-hand side and an RK4 integrator
datagen      target functions, noisy datasets, standardization
network      tanh MLP with manual gradients
optimize     Adam initial fits and proximal-gradient group-Lasso training
dictionary   monomial-dictionary sparse regression baseline
selection    lambda grids and BIC model choice
metrics      sensitivity, specificity, relative test error
harness      replicated experiments and table output
"""
from .errors import (
    AglnetError,
    AglnetIOError,
    DegenerateDataError,
    DivergenceError,
    InvalidConfigurationError,
    ResourceError,
    SweepError,
    UndefinedMetricError,
)

__version__ = "0.1.0"
