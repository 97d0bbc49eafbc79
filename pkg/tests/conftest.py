import numpy as np
from scipy.signal import lfilter

from predasym.rng import make_rng


def ar1_pair(a=0.8, c=0.8, n=10000, seed=0, sigma_x=1.0, sigma_y=1.0, burn=500):
    """Fast sampler of the one-way AR pair used by the exact oracle:
    x(t) = a x(t-1) + sigma_x w(t), y(t) = c x(t-1) + sigma_y v(t)."""
    rng = make_rng(seed)
    total = n + burn
    w = rng.normal(0.0, sigma_x, size=total)
    v = rng.normal(0.0, sigma_y, size=total)
    x = lfilter([1.0], [1.0, -a], w)
    y = np.empty(total)
    y[0] = v[0]
    y[1:] = c * x[:-1] + v[1:]
    return x[burn:], y[burn:]
