import logging
import math
import time
import numpy as np
import pandas as pd
from concurrent.futures import ProcessPoolExecutor

from rpwmetric.classes.OTProfile import OTProfile
from rpwmetric.classes.RPWResult import RPWResult
from rpwmetric.modules.distributions import cost_matrix, normalize
from rpwmetric.modules.exact_ot import augmenting_paths, bottleneck_profile, max_flow_disc, \
    ot_profile, partial_ot, partial_wp, add_breakpoint
from rpwmetric.util.check_args import delta_check, k_check, normalized_check, shape_check
from rpwmetric.util.utils import MASS_TOL, nth_root

# slack when comparing a partial distance against k * eps
COMPARE_TOL = 1e-12

# the two Levy-Prokhorov computations must agree to this
LP_AGREEMENT_TOL = 1e-7


def _elapsed_ms(start):
    return (time.perf_counter() - start) * 1000.0


def _check_inputs(mu, nu, cm):
    normalized_check(cm)
    shape_check(mu, nu, cm)


def rpw(mu, nu, cm, p=None, k=1.0):
    """
    The (p,k)-RPW distance: the smallest eps with W_{p,1-eps}(mu, nu) <= k * eps.
    For finite p the exact OT-profile is intersected with the line y = k(1 - x);
    for p = inf the bottleneck profile is scanned. k = 0 (and a cost matrix
    with every entry 0) gives the total variation distance.

    :param mu: DiscreteDistribution
    :param nu: DiscreteDistribution
    :param cm: normalized CostMatrix between mu and nu
    :param p: exponent in [1, inf]; defaults to cm.p
    :param k: slope parameter >= 0
    :return: RPWResult
    """
    start = time.perf_counter()
    k_check(k)
    _check_inputs(mu, nu, cm)
    p = cm.p if p is None else p
    if k == 0 or cm.degenerate:
        eps, method = tv(mu, nu), 'total_variation'
    elif math.isinf(p):
        eps, method = bottleneck_profile(mu, nu, cm).crossing(k), 'profile_intersection'
    else:
        eps, method = ot_profile(mu, nu, cm, p).crossing(k), 'profile_intersection'
    return RPWResult(eps, p, k, method, n_mu=len(mu), n_nu=len(nu), wall_time_ms=_elapsed_ms(start))


def rpw_binary_search(mu, nu, cm, p=None, k=1.0, delta=1e-4):
    """
    Guess-and-halve computation of the (p,k)-RPW. Starting from g = 1/2, each
    step solves one partial OT problem at mass 1 - g and moves g down by
    2^-(i+1) if W_{p,1-g} <= k * g, up otherwise. Stops once 2^-i <= delta,
    at which point the guess is within delta of the exact value.

    :param mu: DiscreteDistribution
    :param nu: DiscreteDistribution
    :param cm: normalized CostMatrix
    :param p: exponent; defaults to cm.p
    :param k: slope parameter > 0
    :param delta: additive tolerance in (0, 0.5]
    :return: RPWResult
    """
    start = time.perf_counter()
    k_check(k, positive=True)
    delta_check(delta, upper=0.5)
    _check_inputs(mu, nu, cm)
    p = cm.p if p is None else p
    if math.isinf(p):
        profile = bottleneck_profile(mu, nu, cm)

        def partial_distance(alpha):
            return profile.value(alpha)
    else:
        def partial_distance(alpha):
            return partial_wp(mu, nu, cm, alpha, p)

    guess, i = 0.5, 1
    while 2.0 ** -i > delta:
        if partial_distance(1.0 - guess) <= k * guess + COMPARE_TOL:
            guess -= 2.0 ** -(i + 1)
        else:
            guess += 2.0 ** -(i + 1)
        i += 1
    logging.debug('binary search finished after {} partial OT solves'.format(i - 1))
    return RPWResult(guess, p, k, 'binary_search', n_mu=len(mu), n_nu=len(nu), wall_time_ms=_elapsed_ms(start))


def rpw_approx(mu, nu, cm, p=None, k=1.0, delta=1e-3):
    """
    (p,k)-RPW from a truncated OT-profile, never below the exact value and at
    most delta above it.

    Successive shortest paths run until the crossing is pinned down. The
    computed part of the profile is exact. Past the last breakpoint (F, C),
    whose incoming slope is s, the true profile lies between the lower
    continuation C + s(x - F) (convexity) and the upper continuation
    C + (x - F) (no unit of mass costs more than 1). Augmentation stops once the
    two continuations differ by at most delta' = (k * delta / 2) ** p wherever
    the crossing can still lie, and the crossing with the upper continuation is
    returned.

    :param mu: DiscreteDistribution
    :param nu: DiscreteDistribution
    :param cm: normalized CostMatrix
    :param p: finite exponent; defaults to cm.p
    :param k: slope parameter > 0
    :param delta: additive tolerance > 0
    :return: RPWResult
    """
    start = time.perf_counter()
    k_check(k, positive=True)
    delta_check(delta)
    _check_inputs(mu, nu, cm)
    p = cm.p if p is None else p
    if math.isinf(p):
        raise ValueError('rpw_approx needs a finite p')
    closeness = (k * delta / 2.0) ** p

    masses, costs = [0.0], [0.0]
    last_slope = None
    n_paths = 0
    for mass, cost, slope in augmenting_paths(mu, nu, cm, p):
        n_paths += 1
        add_breakpoint(masses, costs, mass, cost, slope, last_slope)
        last_slope = slope
        if mass >= 1.0 - MASS_TOL:
            break
        if nth_root(cost, p) >= k * (1.0 - mass):
            # crossing is on the computed part
            break
        lower_eps = _extended(masses, costs, slope, p).crossing(k)
        if (1.0 - slope) * max(0.0, 1.0 - lower_eps - mass) <= closeness:
            break
    if masses[-1] >= 1.0 - MASS_TOL:
        masses[-1] = 1.0
        profile = OTProfile(masses, costs, p)
    else:
        profile = _extended(masses, costs, 1.0, p)
    logging.debug('approximate profile used {} augmenting paths'.format(n_paths))
    return RPWResult(profile.crossing(k), p, k, 'approx_profile', n_mu=len(mu), n_nu=len(nu),
                     wall_time_ms=_elapsed_ms(start))


def _extended(masses, costs, slope, p):
    """profile known up to masses[-1], continued linearly to mass 1 with the given slope"""
    x_end, c_end = masses[-1], costs[-1]
    return OTProfile(masses + [1.0], costs + [c_end + slope * (1.0 - x_end)], p, upper_tail=True)


def profile_point_bounds(untransported, wp_value, k):
    """
    Any transport plan that leaves `untransported` mass behind at cost `wp_value`
    brackets the (p,k)-RPW: it lies between min and max of untransported and wp_value / k.

    :param untransported: 1 - transported mass of the plan
    :param wp_value: w_p of the plan (unit-diameter units)
    :param k: slope parameter > 0
    :return: (lower, upper)
    """
    k_check(k, positive=True)
    scaled = wp_value / k
    return min(untransported, scaled), max(untransported, scaled)


def tv(mu, nu):
    """
    Total variation distance: the mass of mu left over once all co-located
    mass cancels. Locations match on exact coordinate equality.

    :param mu: DiscreteDistribution
    :param nu: DiscreteDistribution
    :return: float in [0, 1]
    """
    if mu.dim != nu.dim:
        raise ValueError('dimension mismatch: {} vs {}'.format(mu.dim, nu.dim))
    joined = pd.concat([mu.mass_by_location().rename('mu'), nu.mass_by_location().rename('nu')],
                       axis=1, sort=True).fillna(0.0)
    excess = (joined['mu'] - joined['nu']).clip(lower=0.0).sum()
    return float(min(max(excess, 0.0), 1.0))


def levy_prokhorov(mu, nu, cm, cross_check=True):
    """
    Levy-Prokhorov distance, computed as the (inf,1)-RPW. With `cross_check`
    the value is recomputed by the direct disc-graph scan and the two must agree.

    :param mu: DiscreteDistribution
    :param nu: DiscreteDistribution
    :param cm: normalized CostMatrix
    :param cross_check: also run levy_prokhorov_scan
    :return: float
    """
    value = rpw(mu, nu, cm, p=math.inf, k=1.0).epsilon
    if cross_check:
        scanned = levy_prokhorov_scan(mu, nu, cm)
        if abs(value - scanned) > LP_AGREEMENT_TOL:
            raise RuntimeError('Levy-Prokhorov computations disagree: {} vs {}'.format(value, scanned))
    return value


def levy_prokhorov_scan(mu, nu, cm):
    """
    Levy-Prokhorov distance from max-flows on disc graphs: with F(delta) the
    mass transportable at distance <= delta, it is min over the distinct costs
    delta_j of max(delta_j, 1 - F(delta_j)). The scan stops as soon as no
    larger threshold can improve on the best value.

    :param mu: DiscreteDistribution
    :param nu: DiscreteDistribution
    :param cm: normalized CostMatrix
    :return: float
    """
    _check_inputs(mu, nu, cm)
    thresholds = cm.thresholds()
    best = 1.0
    for j, delta in enumerate(thresholds):
        remaining = 1.0 - max_flow_disc(mu, nu, cm, delta)
        if remaining <= MASS_TOL:
            remaining = 0.0
        best = min(best, max(float(delta), remaining))
        if j + 1 == thresholds.size or best <= thresholds[j + 1]:
            break
    return best


def wasserstein(mu, nu, cm, p=None):
    """
    p-Wasserstein distance W_p(mu, nu): the full-mass partial problem for
    finite p, the bottleneck threshold carrying all mass for p = inf.

    :param mu: DiscreteDistribution
    :param nu: DiscreteDistribution
    :param cm: normalized CostMatrix
    :param p: exponent; defaults to cm.p
    :return: float
    """
    p = cm.p if p is None else p
    if math.isinf(p):
        _check_inputs(mu, nu, cm)
        return bottleneck_profile(mu, nu, cm).value(1.0)
    return partial_ot(mu, nu, cm, 1.0, p).wp


def evaluate(metric, mu, nu, cm):
    """
    Distance between mu and nu under a MetricSpec.

    :param metric: MetricSpec
    :param mu: DiscreteDistribution
    :param nu: DiscreteDistribution
    :param cm: normalized CostMatrix
    :return: float
    """
    if metric.kind == 'tv':
        return tv(mu, nu)
    if metric.kind == 'lp':
        return levy_prokhorov(mu, nu, cm, cross_check=False)
    if metric.kind == 'w':
        return wasserstein(mu, nu, cm, metric.p)
    if metric.k == 0:
        return tv(mu, nu)
    if metric.method == 'approx' and not math.isinf(metric.p):
        return rpw_approx(mu, nu, cm, metric.p, metric.k, metric.delta).epsilon
    if metric.method == 'binary':
        return rpw_binary_search(mu, nu, cm, metric.p, metric.k, metric.delta).epsilon
    return rpw(mu, nu, cm, metric.p, metric.k).epsilon


def _pair_distance(task):
    left, right, metric, diameter = task
    cm = normalize(cost_matrix(left, right), diameter)
    return evaluate(metric, left, right, cm)


def distance_matrix(lefts, rights, metric, diameter=None, jobs=1):
    """
    All-pairs distances between two lists of distributions. Pairs are
    independent and run on up to `jobs` worker processes; results come back
    in row-major order regardless of scheduling.

    :param lefts: list of DiscreteDistribution (rows)
    :param rights: list of DiscreteDistribution (columns)
    :param metric: MetricSpec
    :param diameter: common space diameter for normalization (None: per-pair largest cost)
    :param jobs: number of worker processes
    :return: ndarray of shape (len(lefts), len(rights))
    """
    if jobs < 1:
        raise ValueError('jobs must be >= 1, got {}'.format(jobs))
    tasks = [(left, right, metric, diameter) for left in lefts for right in rights]
    if jobs == 1 or len(tasks) < 2:
        values = list(map(_pair_distance, tasks))
    else:
        chunk = max(1, len(tasks) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            values = list(executor.map(_pair_distance, tasks, chunksize=chunk))
    return np.array(values, dtype=np.float64).reshape(len(lefts), len(rights))
