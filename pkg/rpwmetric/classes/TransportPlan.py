import math
import numpy as np

from rpwmetric.util.utils import MASS_TOL, nth_root


class TransportPlan:
    """
    A sparse (sub-)coupling: a list of edges (source atom, target atom, mass > 0).
    """
    def __init__(self, sources, targets, masses, p, p_cost):
        """
        :param sources: source atom indices
        :param targets: target atom indices
        :param masses: positive mass on each edge
        :param p: exponent the plan was optimized for
        :param p_cost: sum of mass * c^p (finite p) or the largest edge cost (p = inf)
        """
        self.sources = np.asarray(sources, dtype=np.int64)
        self.targets = np.asarray(targets, dtype=np.int64)
        self.masses = np.asarray(masses, dtype=np.float64)
        self.p = p
        self.p_cost = float(p_cost)

    @classmethod
    def from_dense(cls, plan, costs, p):
        """
        Build a plan from a dense (n, m) coupling matrix.

        :param plan: ndarray of transported mass
        :param costs: ndarray of raw ground distances
        :param p: exponent
        :return: TransportPlan
        """
        rows, cols = np.nonzero(plan > 0)
        masses = plan[rows, cols]
        edge_costs = costs[rows, cols]
        if math.isinf(p):
            p_cost = float(edge_costs.max()) if masses.size else 0.0
        else:
            p_cost = float(np.sum(masses * edge_costs ** p))
        return cls(rows, cols, masses, p, p_cost)

    @property
    def edges(self):
        return list(zip(self.sources.tolist(), self.targets.tolist(), self.masses.tolist()))

    @property
    def transported_mass(self):
        return float(self.masses.sum())

    @property
    def wp(self):
        """
        the cost w_p of the plan (p-th root of p_cost; p_cost itself for p = inf)
        """
        if math.isinf(self.p):
            return self.p_cost
        return nth_root(self.p_cost, self.p)

    def outflow(self, n):
        return np.bincount(self.sources, weights=self.masses, minlength=n)

    def inflow(self, m):
        return np.bincount(self.targets, weights=self.masses, minlength=m)

    def is_feasible(self, mu, nu, tol=MASS_TOL):
        """
        check the sub-coupling marginal constraints against mu and nu

        :param mu: source DiscreteDistribution
        :param nu: target DiscreteDistribution
        :param tol: slack on each constraint
        :return: bool
        """
        if np.any(self.masses <= 0):
            return False
        out_ok = np.all(self.outflow(len(mu)) <= mu.masses + tol)
        in_ok = np.all(self.inflow(len(nu)) <= nu.masses + tol)
        return bool(out_ok and in_ok and self.transported_mass <= 1 + tol)
