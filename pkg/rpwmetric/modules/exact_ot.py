import logging
import math
import networkx as nx
import numpy as np
import ot

from rpwmetric.classes.BottleneckProfile import BottleneckProfile
from rpwmetric.classes.OTProfile import OTProfile
from rpwmetric.classes.TransportNetwork import TransportNetwork
from rpwmetric.classes.TransportPlan import TransportPlan
from rpwmetric.util.check_args import alpha_check, normalized_check, shape_check
from rpwmetric.util.utils import CROSSING_TOL, FLOW_EPS, MASS_TOL, MAX_FLOW_EDGES

# network simplex iteration cap for ot.emd
EMD_MAX_ITER = 10 ** 7


def _check_inputs(mu, nu, cm):
    normalized_check(cm)
    shape_check(mu, nu, cm)


def partial_ot(mu, nu, cm, alpha, p=None):
    """
    Cheapest sub-coupling of mu and nu that transports exactly alpha mass.
    For finite p this is a balanced OT problem on an extended space: one dummy
    target absorbs the 1 - alpha mass of mu that stays put and one dummy source
    feeds the 1 - alpha mass of nu that is not reached, both at zero cost, while
    dummy-to-dummy transport is priced out. The network simplex of POT solves it.
    For p = inf the plan is a maximum flow on the smallest sufficient disc graph.

    :param mu: source DiscreteDistribution
    :param nu: target DiscreteDistribution
    :param cm: normalized CostMatrix between mu and nu
    :param alpha: mass to transport, in [0, 1]
    :param p: exponent; defaults to cm.p
    :return: TransportPlan
    """
    _check_inputs(mu, nu, cm)
    alpha_check(alpha)
    p = cm.p if p is None else p
    alpha = min(max(float(alpha), 0.0), 1.0)
    if alpha <= MASS_TOL:
        return TransportPlan([], [], [], p, 0.0)
    if math.isinf(p):
        return _bottleneck_plan(mu, nu, cm, alpha)

    n, m = cm.shape
    powered = cm.power(p)
    slack = 1.0 - alpha
    a_ext = np.append(mu.masses, slack)
    b_ext = np.append(nu.masses, slack)
    m_ext = np.zeros((n + 1, m + 1))
    m_ext[:n, :m] = powered
    m_ext[n, m] = 2.0 * powered.max() + 1.0
    gamma, log = ot.emd(a_ext, b_ext, m_ext, numItermax=EMD_MAX_ITER, log=True)
    if log.get('warning') is not None:
        raise RuntimeError('partial OT solver failed: {}'.format(log['warning']))
    gamma = np.asarray(gamma)[:n, :m]
    gamma[gamma <= FLOW_EPS] = 0.0
    return TransportPlan.from_dense(gamma, cm.costs, p)


def _bottleneck_plan(mu, nu, cm, alpha):
    """
    p = inf plan: max-flow on the disc graph of the smallest threshold carrying
    alpha mass, scaled down to alpha
    """
    threshold = bottleneck_profile(mu, nu, cm).value(alpha)
    flow_value, flow_dict = nx.maximum_flow(_disc_graph(mu, nu, cm, threshold), 's', 't')
    n, m = cm.shape
    plan = np.zeros((n, m))
    for i in range(n):
        for node, amount in flow_dict[('u', i)].items():
            plan[i, node[1]] = amount
    plan *= alpha / flow_value
    plan[plan <= FLOW_EPS] = 0.0
    return TransportPlan.from_dense(plan, cm.costs, math.inf)


def partial_wp(mu, nu, cm, alpha, p=None):
    """
    the alpha-partial p-Wasserstein distance W_{p,alpha}(mu, nu)

    :return: float
    """
    p = cm.p if p is None else p
    if math.isinf(p):
        _check_inputs(mu, nu, cm)
        alpha_check(alpha)
        return bottleneck_profile(mu, nu, cm).value(alpha)
    return partial_ot(mu, nu, cm, alpha, p).wp


def augmenting_paths(mu, nu, cm, p=None):
    """
    Run successive shortest paths on the transportation network of mu and nu
    with per-unit costs c^p, yielding the state after every augmentation.

    :param mu: source DiscreteDistribution
    :param nu: target DiscreteDistribution
    :param cm: normalized CostMatrix
    :param p: finite exponent; defaults to cm.p
    :return: generator of (transported mass, p-th power cost, slope of the last path)
    """
    _check_inputs(mu, nu, cm)
    p = cm.p if p is None else p
    if math.isinf(p):
        raise ValueError('the OT-profile needs a finite p; use bottleneck_profile for p = inf')
    network = TransportNetwork(mu.masses, nu.masses, cm.power(p))
    mass, cost = 0.0, 0.0
    while True:
        step = network.augment()
        if step is None:
            return
        amount, slope = step
        if amount <= 0:
            return
        mass += amount
        cost += amount * slope
        yield mass, cost, slope


def ot_profile(mu, nu, cm, p=None):
    """
    Exact OT-profile of mu and nu: every augmentation of successive shortest
    paths adds one linear piece, with slope equal to the per-unit cost of the path.

    :param mu: source DiscreteDistribution
    :param nu: target DiscreteDistribution
    :param cm: normalized CostMatrix
    :param p: finite exponent; defaults to cm.p
    :return: OTProfile
    """
    p = cm.p if p is None else p
    masses, costs = [0.0], [0.0]
    last_slope = None
    for mass, cost, slope in augmenting_paths(mu, nu, cm, p):
        add_breakpoint(masses, costs, mass, cost, slope, last_slope)
        last_slope = slope
    if abs(masses[-1] - 1.0) <= MASS_TOL:
        masses[-1] = 1.0
    return OTProfile(masses, costs, p)


def add_breakpoint(masses, costs, mass, cost, slope, last_slope):
    """append (mass, cost), merging it into the last piece if the slope did not change"""
    collinear = last_slope is not None and len(masses) > 1 and \
        abs(slope - last_slope) <= CROSSING_TOL * max(1.0, abs(slope))
    if collinear:
        masses[-1] = mass
        costs[-1] = cost
    elif mass > masses[-1]:
        masses.append(mass)
        costs.append(cost)


def bottleneck_profile(mu, nu, cm):
    """
    p = inf profile: for every distinct ground distance delta (ascending), the
    largest mass transportable on the delta-disc graph. One residual network is
    grown threshold by threshold, so each max-flow starts from the previous one.

    :param mu: source DiscreteDistribution
    :param nu: target DiscreteDistribution
    :param cm: normalized CostMatrix
    :return: BottleneckProfile
    """
    _check_inputs(mu, nu, cm)
    n, m = cm.shape
    if n * m > MAX_FLOW_EDGES:
        raise ValueError('disc graph with {} edges exceeds the limit of {}'.format(n * m, MAX_FLOW_EDGES))
    thresholds = cm.thresholds()
    network = TransportNetwork(mu.masses, nu.masses, np.zeros((n, m)))
    flows = np.empty(thresholds.size)
    for idx, delta in enumerate(thresholds):
        flows[idx] = network.max_flow(cm.costs <= delta)
        if flows[idx] >= 1.0 - MASS_TOL:
            flows[idx:] = flows[idx]
            break
    logging.debug('bottleneck profile over {} thresholds'.format(thresholds.size))
    return BottleneckProfile(thresholds, flows)


def _disc_graph(mu, nu, cm, delta):
    """
    flow network s -> u_i (capacity mu_i) -> v_j (uncapacitated, c <= delta) -> t (capacity nu_j)
    """
    graph = nx.DiGraph()
    for i, mass in enumerate(mu.masses):
        graph.add_edge('s', ('u', i), capacity=float(mass))
    for j, mass in enumerate(nu.masses):
        graph.add_edge(('v', j), 't', capacity=float(mass))
    rows, cols = np.nonzero(cm.costs <= delta)
    graph.add_edges_from((('u', int(i)), ('v', int(j))) for i, j in zip(rows, cols))
    return graph


def max_flow_disc(mu, nu, cm, delta):
    """
    Largest mass routable from mu to nu using only pairs at distance <= delta
    (maximum flow on the delta-disc graph, computed with networkx).

    :param mu: source DiscreteDistribution
    :param nu: target DiscreteDistribution
    :param cm: CostMatrix
    :param delta: threshold >= 0
    :return: transportable mass
    """
    shape_check(mu, nu, cm)
    if delta < 0:
        raise ValueError('delta must be >= 0, got {}'.format(delta))
    return float(nx.maximum_flow_value(_disc_graph(mu, nu, cm, delta), 's', 't'))
