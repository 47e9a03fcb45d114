import math
import numpy as np
import pandas as pd
from scipy import optimize

from rpwmetric.util.utils import CROSSING_TOL, MASS_TOL, PROFILE_COLS, nth_root


class OTProfile:
    """
    The OT-profile of two distributions in p-th power form: a convex piecewise
    linear curve of the minimal total cost C(alpha) of transporting alpha mass.
    The partial p-Wasserstein distance at alpha is C(alpha) ** (1/p).
    """
    def __init__(self, masses, costs, p, upper_tail=False):
        """
        :param masses: breakpoint masses, starting at 0 and strictly increasing
        :param costs: p-th power cost at each breakpoint, starting at 0
        :param p: finite exponent
        :param upper_tail: True if the last segment is an upper bound
            rather than part of the exact curve (truncated profiles)
        """
        masses = np.asarray(masses, dtype=np.float64)
        costs = np.asarray(costs, dtype=np.float64)
        if masses.shape != costs.shape or masses.size < 1:
            raise ValueError('profile needs matching, non-empty breakpoint arrays')
        if masses[0] != 0 or costs[0] != 0:
            raise ValueError('profile must start at (0, 0)')
        if np.any(np.diff(masses) <= 0):
            raise ValueError('breakpoint masses must be strictly increasing')
        if math.isinf(p):
            raise ValueError('use BottleneckProfile for p = inf')
        self.masses = masses
        self.costs = costs
        self.p = p
        self.upper_tail = upper_tail

    def __len__(self):
        return self.masses.size

    @property
    def breakpoints(self):
        return list(zip(self.masses.tolist(), self.costs.tolist()))

    @property
    def total_mass(self):
        return float(self.masses[-1])

    def slopes(self):
        """
        :return: slope of each linear segment (nondecreasing for an exact profile)
        """
        return np.diff(self.costs) / np.diff(self.masses)

    def cost_at(self, alpha):
        """
        p-th power cost of transporting alpha mass (linear interpolation)

        :param alpha: scalar or array of masses in [0, total_mass]
        :return: C(alpha)
        """
        return np.interp(alpha, self.masses, self.costs)

    def wp_at(self, alpha):
        """
        the partial p-Wasserstein distance W_{p,alpha}

        :param alpha: scalar mass
        :return: C(alpha) ** (1/p)
        """
        return nth_root(float(self.cost_at(alpha)), self.p)

    def is_convex(self, tol=1e-9):
        s = self.slopes()
        return bool(np.all(np.diff(s) >= -tol))

    def crossing(self, k):
        """
        Solve W_{p,1-eps} = k * eps for the unique eps in [0, 1]: the
        intersection of the profile with the line y = k(1 - x).

        :param k: slope parameter, > 0
        :return: eps
        """
        if k <= 0:
            raise ValueError('crossing needs k > 0')
        if self.total_mass < 1 - MASS_TOL:
            raise ValueError('profile must reach mass 1, got {}'.format(self.total_mass))
        wp = np.maximum(self.costs, 0.0) ** (1.0 / self.p)
        gap = wp - k * (1.0 - self.masses)
        # gap is -k at mass 0 and increasing in mass
        idx = int(np.argmax(gap >= 0)) if np.any(gap >= 0) else self.masses.size - 1
        if gap[idx] == 0:
            return float(1.0 - self.masses[idx])
        lo, hi = idx - 1, idx
        x_a, c_a = self.masses[lo], self.costs[lo]
        slope = (self.costs[hi] - c_a) / (self.masses[hi] - x_a)
        eps_min, eps_max = 1.0 - self.masses[hi], 1.0 - x_a
        return _solve_segment(x_a, c_a, slope, k, self.p, max(eps_min, 0.0), eps_max)

    def to_frame(self):
        """
        :return: DataFrame with columns mass, p_power_cost, wp_value
        """
        return pd.DataFrame({PROFILE_COLS[0]: self.masses,
                             PROFILE_COLS[1]: self.costs,
                             PROFILE_COLS[2]: np.maximum(self.costs, 0.0) ** (1.0 / self.p)},
                            columns=PROFILE_COLS)


def _solve_segment(x_a, c_a, slope, k, p, eps_min, eps_max):
    """
    root of (c_a + slope * (1 - eps - x_a)) ** (1/p) = k * eps on [eps_min, eps_max]
    """
    reach = c_a + slope * (1.0 - x_a)
    if p == 1:
        eps = reach / (k + slope)
    elif p == 2:
        eps = (-slope + math.sqrt(slope * slope + 4.0 * k * k * max(reach, 0.0))) / (2.0 * k * k)
    else:
        def excess(eps):
            return nth_root(c_a + slope * (1.0 - eps - x_a), p) - k * eps
        if excess(eps_min) <= 0:
            return eps_min
        if excess(eps_max) >= 0:
            return eps_max
        eps = optimize.bisect(excess, eps_min, eps_max, xtol=CROSSING_TOL)
    return float(min(max(eps, eps_min), eps_max))
