import math
import numpy as np


class CostMatrix:
    """
    Ground distances c(a, b) between the atoms of two distributions,
    together with the exponent p and the scale that has been divided out.
    """
    def __init__(self, costs, p=1.0, scale=1.0, normalized=False, degenerate=False):
        """
        :param costs: array-like (n, m) of non-negative distances
        :param p: exponent in [1, inf]
        :param scale: diameter that was divided out by normalize (1.0 for raw costs)
        :param normalized: True once the costs live in a unit-diameter space
        :param degenerate: True if the matrix was all zeros when normalized
        """
        costs = np.array(costs, dtype=np.float64)
        if costs.ndim != 2:
            raise ValueError('costs must be a 2-d matrix')
        if np.any(costs < 0) or np.any(np.isnan(costs)):
            raise ValueError('costs must be non-negative')
        if p < 1:
            raise ValueError('p must be >= 1, got {}'.format(p))
        costs.setflags(write=False)
        self.costs = costs
        self.p = float(p)
        self.scale = float(scale)
        self.normalized = normalized
        self.degenerate = degenerate

    @property
    def shape(self):
        return self.costs.shape

    @property
    def diameter(self):
        """largest entry of the matrix"""
        if self.costs.size == 0:
            return 0.0
        return float(self.costs.max())

    def power(self, p=None):
        """
        the p-th power view of the costs; for p = inf the raw distances

        :param p: exponent; defaults to self.p
        :return: ndarray
        """
        p = self.p if p is None else p
        if math.isinf(p):
            return self.costs
        if p == 1:
            return self.costs
        return self.costs ** p

    def thresholds(self):
        """
        :return: sorted distinct cost values (candidate bottleneck thresholds)
        """
        return np.unique(self.costs)

    def unnormalized(self, value):
        """
        express a distance computed on the normalized matrix in original units

        :param value: distance in unit-diameter units
        :return: value * scale
        """
        return value * self.scale
