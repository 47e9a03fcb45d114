import itertools
import os

import numpy as np
from scipy.optimize import linprog

from rpwmetric.modules.distributions import cost_matrix, from_points, normalize
from rpwmetric.util.utils import TEST_DIR


def testfile(name):
    """
    create a path to a file within the test directory

    :param name: name of file
    :return: path to testfile
    """
    return os.path.join(TEST_DIR, name)


def two_by_two():
    """
    mu = 0.5 a + 0.5 b, nu = 0.4 a + 0.6 b with c(a, b) = 1

    :return: mu, nu, normalized cost matrix
    """
    mu = from_points([[0.0], [1.0]], [0.5, 0.5])
    nu = from_points([[0.0], [1.0]], [0.4, 0.6])
    return mu, nu, normalize(cost_matrix(mu, nu))


def point_with_outlier(weight=0.01):
    """
    mu = delta_x, nu = (1 - weight) delta_x + weight delta_y with c(x, y) = 1

    :return: mu, nu, normalized cost matrix
    """
    mu = from_points([[0.0]], [1.0])
    nu = from_points([[0.0], [1.0]], [1.0 - weight, weight])
    return mu, nu, normalize(cost_matrix(mu, nu))


def random_distribution(rng, n_atoms, d, grid=None):
    """
    random masses on random points of [0, 1]^d; with `grid`, points are
    drawn from a lattice with that many values per axis so supports overlap

    :param rng: numpy Generator
    :param n_atoms: support size
    :param d: dimension
    :param grid: optional lattice resolution
    :return: DiscreteDistribution
    """
    if grid is None:
        points = rng.random((n_atoms, d))
    else:
        points = rng.integers(0, grid, size=(n_atoms, d)) / float(grid)
    return from_points(points, rng.random(n_atoms) + 0.05)


def random_instance(rng, max_atoms=5, max_d=3, grid=None):
    """
    :return: mu, nu of random sizes in [1, max_atoms] and a common random dimension
    """
    d = int(rng.integers(1, max_d + 1))
    mu = random_distribution(rng, int(rng.integers(1, max_atoms + 1)), d, grid)
    nu = random_distribution(rng, int(rng.integers(1, max_atoms + 1)), d, grid)
    return mu, nu


def linprog_partial_cost(mu, nu, cm, alpha, p):
    """
    reference value of the alpha-partial problem: minimize sum c^p * gamma over
    sub-couplings gamma >= 0 with row sums <= mu, column sums <= nu and total mass alpha

    :return: p-th power cost
    """
    n, m = cm.shape
    powered = cm.power(p).ravel()
    rows = np.zeros((n, n * m))
    cols = np.zeros((m, n * m))
    for i, j in itertools.product(range(n), range(m)):
        rows[i, i * m + j] = 1.0
        cols[j, i * m + j] = 1.0
    res = linprog(powered,
                  A_ub=np.vstack([rows, cols]), b_ub=np.concatenate([mu.masses, nu.masses]),
                  A_eq=np.ones((1, n * m)), b_eq=[alpha],
                  bounds=(0, None), method='highs')
    if not res.success:
        raise RuntimeError('reference LP failed: {}'.format(res.message))
    return float(res.fun)


def brute_force_rpw(mu, nu, cm, p, k, steps=2000):
    """
    the (p,k)-RPW on a dense epsilon grid with the LP reference: the first grid
    point where W_{p,1-eps} <= k * eps (resolution 1 / steps)
    """
    for step in range(steps + 1):
        eps = step / float(steps)
        if linprog_partial_cost(mu, nu, cm, 1.0 - eps, p) ** (1.0 / p) <= k * eps + 1e-12:
            return eps
    return 1.0
