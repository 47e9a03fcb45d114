import math
import os

from rpwmetric.util.utils import MASS_TOL


def file_check(path, what):
    """
    check that an input file is provided and it exists.

    :param path: path to the file
    :param what: description used in the error message (e.g. 'distribution file')
    :return: None
    """
    if not path:
        raise IOError('{} not provided'.format(what))
    if not os.path.exists(path):
        raise FileNotFoundError('{} {} does not exist. Please check filename'.format(what, path))


def alpha_check(alpha):
    """
    check that a transported mass lies in [0, 1]

    :param alpha: mass to transport
    :return: None
    """
    if not (-MASS_TOL <= alpha <= 1 + MASS_TOL):
        raise ValueError('alpha must be in [0, 1], got {}'.format(alpha))


def k_check(k, positive=False):
    """
    check the slope parameter k of the (p,k)-RPW.

    :param k: slope parameter
    :param positive: if True, k = 0 is rejected as well
    :return: None
    """
    if k is None or math.isnan(k) or k < 0:
        raise ValueError('k must be >= 0, got {}'.format(k))
    if positive and k == 0:
        raise ValueError('k must be > 0 for this method; use tv() for k = 0')


def delta_check(delta, upper=None):
    """
    check an additive tolerance delta > 0 (optionally bounded above)

    :param delta: tolerance
    :param upper: inclusive upper bound, or None
    :return: None
    """
    if delta is None or math.isnan(delta) or delta <= 0:
        raise ValueError('delta must be > 0, got {}'.format(delta))
    if upper is not None and delta > upper:
        raise ValueError('delta must be <= {}, got {}'.format(upper, delta))


def normalized_check(cm):
    """
    RPW and its relatives are defined on a unit-diameter space:
    the cost matrix must have gone through normalize() or be degenerate.

    :param cm: CostMatrix
    :return: None
    """
    if not (cm.normalized or cm.degenerate) or cm.diameter > 1 + MASS_TOL:
        raise ValueError('Cost matrix is not normalized (diameter {}). '
                         'Call normalize() first'.format(cm.diameter))


def shape_check(mu, nu, cm):
    """
    check that the cost matrix matches the two supports

    :param mu: DiscreteDistribution (rows)
    :param nu: DiscreteDistribution (columns)
    :param cm: CostMatrix
    :return: None
    """
    if cm.costs.shape != (len(mu), len(nu)):
        raise ValueError('Cost matrix shape {} does not match supports ({}, {})'.format(
            cm.costs.shape, len(mu), len(nu)))
