import math
import os
import pkg_resources

BASE_DIR = pkg_resources.resource_filename('rpwmetric', '/')
DATA_DIR = os.path.join(BASE_DIR, 'data')
TEST_DIR = os.path.join(DATA_DIR, 'test')

# tolerance for probability-sum and marginal checks
MASS_TOL = 1e-9

# residual capacities at or below this are treated as exhausted by the flow solvers
FLOW_EPS = 1e-13

# tolerance on the epsilon of the profile crossing
CROSSING_TOL = 1e-12

# desk-scale caps
MAX_SAMPLE_SIZE = 10 ** 5
MAX_FLOW_EDGES = 4 * 10 ** 6

# the delta used by retrieval for approximate RPW
RETRIEVAL_DELTA = 1e-3

# column names of exported tables
PROFILE_COLS = ['mass', 'p_power_cost', 'wp_value']
REPORT_COLS = ['metric', 'n', 'seed', 'value']
SUMMARY_COLS = ['metric', 'slope', 'stderr']
RETRIEVAL_COLS = ['metric', 'scenario', 'm', 'accuracy']


def parse_exponent(value):
    """
    parse an exponent p given on the command line or in a metric name.
    the literal 'inf' (any case) maps to math.inf

    :param value: string or number
    :return: float in [1, inf]
    """
    if isinstance(value, str):
        value = value.strip().lower()
        if value in ('inf', 'infinity', 'oo'):
            return math.inf
    try:
        p = float(value)
    except (TypeError, ValueError):
        raise ValueError('Exponent p must be a number >= 1 or "inf", got {}'.format(value))
    if math.isnan(p) or p < 1:
        raise ValueError('Exponent p must be >= 1, got {}'.format(value))
    return p


def format_exponent(p):
    """
    inverse of parse_exponent, used in metric names and file output

    :param p: float exponent
    :return: 'inf' or the shortest representation of p
    """
    if math.isinf(p):
        return 'inf'
    return '{:g}'.format(p)


def nth_root(value, p):
    """
    p-th root of a non-negative cost; tiny negative round-off is clipped to 0

    :param value: p-th power cost
    :param p: exponent (finite)
    :return: value ** (1/p)
    """
    return max(value, 0.0) ** (1.0 / p)


OUTLIER_COLS = ['delta', 'rpw_clean', 'rpw_contaminated', 'lower', 'upper',
                'wp_clean', 'wp_contaminated', 'wp_convexity_bound', 'wp_inflation']
GRID_COLS = ['n', 'seed', 'excess', 'untransported', 'cost_bound', 'certificate', 'exact_rpw']

# metrics of the convergence experiment when none are given
CONVERGENCE_METRICS = ['W2', 'TV', 'RPW(2,0.1)', 'RPW(2,1)', 'RPW(2,10)']
# metrics of the retrieval benchmark when none are given
RETRIEVAL_METRICS = ['W1', 'W2', 'TV', 'RPW(2,1)', 'RPW(2,0.1)']

# repetitions per sample size
N_REPETITIONS = 10
