import numpy as np
import pandas as pd

from rpwmetric.util.utils import MASS_TOL


class BottleneckProfile:
    """
    The p = inf OT-profile as a step function. For each candidate threshold
    delta_j (the sorted distinct ground distances) it stores F_j, the largest
    mass that can be moved using only pairs at distance <= delta_j.
    """
    def __init__(self, thresholds, flows):
        """
        :param thresholds: sorted distinct distances
        :param flows: max transportable mass at each threshold (nondecreasing)
        """
        self.thresholds = np.asarray(thresholds, dtype=np.float64)
        self.flows = np.asarray(flows, dtype=np.float64)
        if self.thresholds.shape != self.flows.shape or self.thresholds.size == 0:
            raise ValueError('thresholds and flows must be non-empty and of equal length')

    def __len__(self):
        return self.thresholds.size

    def value(self, alpha):
        """
        W_{inf,alpha}: the smallest threshold whose disc graph carries alpha mass

        :param alpha: mass in [0, 1]
        :return: threshold, or inf if alpha exceeds the total transportable mass
        """
        if alpha <= MASS_TOL:
            return 0.0
        ok = self.flows >= alpha - MASS_TOL
        if not np.any(ok):
            return np.inf
        return float(self.thresholds[int(np.argmax(ok))])

    def at_epsilon(self, eps):
        """
        the step function eps -> W_{inf,1-eps}
        """
        return self.value(1.0 - eps)

    def crossing(self, k):
        """
        smallest eps with W_{inf,1-eps} <= k * eps, which is
        min over j of max(1 - F_j, delta_j / k)

        :param k: slope parameter > 0
        :return: eps in [0, 1]
        """
        if k <= 0:
            raise ValueError('crossing needs k > 0')
        untransported = np.clip(1.0 - self.flows, 0.0, 1.0)
        untransported[untransported <= MASS_TOL] = 0.0
        candidates = np.maximum(untransported, self.thresholds / k)
        return float(min(candidates.min(), 1.0))

    def to_frame(self):
        return pd.DataFrame({'threshold': self.thresholds, 'mass': self.flows})
