import logging
import math
import numpy as np
import pandas as pd
from concurrent.futures import ProcessPoolExecutor

from rpwmetric.classes.ConvergenceReport import ConvergenceReport, loglog_fit
from rpwmetric.classes.DiscreteDistribution import DiscreteDistribution
from rpwmetric.classes.MetricSpec import MetricSpec
from rpwmetric.classes.SyntheticSampler import SyntheticSampler
from rpwmetric.modules.distributions import cost_matrix, from_points, normalize, support_diameter
from rpwmetric.modules.rpw import evaluate, profile_point_bounds, rpw, wasserstein
from rpwmetric.util.check_args import k_check
from rpwmetric.util.utils import CONVERGENCE_METRICS, GRID_COLS, MAX_FLOW_EDGES, MAX_SAMPLE_SIZE, \
    N_REPETITIONS, OUTLIER_COLS, REPORT_COLS

# slack on the contamination sandwich
SANDWICH_TOL = 1e-7

# cell exponents of the fine and coarse grid of the two-grid transport plan
FINE_EXPONENT = 0.3
COARSE_EXPONENT = 0.2


def _run_tasks(func, tasks, jobs):
    """map func over tasks on up to `jobs` processes, keeping task order"""
    if jobs < 1:
        raise ValueError('jobs must be >= 1, got {}'.format(jobs))
    if jobs == 1 or len(tasks) < 2:
        return [func(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(func, tasks))


def _as_specs(metrics):
    return [m if isinstance(m, MetricSpec) else MetricSpec.parse(m) for m in metrics]


def _convergence_task(task):
    sampler, n, rep, metrics = task
    rng = sampler.rng(n, rep)
    mu = sampler.empirical(n, rng).collapse()
    nu = sampler.empirical(n, rng).collapse()
    cm = None
    if any(m.kind != 'tv' for m in metrics):
        cm = normalize(cost_matrix(mu, nu), sampler.diameter)
    return [(m.name, n, rep, evaluate(m, mu, nu, cm)) for m in metrics]


def convergence_experiment(sampler, n_list, metrics=None, seed=None, repetitions=N_REPETITIONS, jobs=1):
    """
    Distance between two independent n-sample empirical distributions of the
    same source, for every n in n_list, averaged over `repetitions` draws.
    Co-located samples are merged before solving, so discrete sources stay
    cheap at large n.

    :param sampler: SyntheticSampler
    :param n_list: ascending sample sizes, at most MAX_SAMPLE_SIZE
    :param metrics: metric names or MetricSpecs; default W2, TV and RPW(2,k) for k in 0.1, 1, 10
    :param seed: overrides the sampler seed when given
    :param repetitions: draws per sample size
    :param jobs: worker processes
    :return: ConvergenceReport
    """
    if seed is not None:
        sampler = SyntheticSampler(sampler.kind, seed=seed, d=sampler.d, custom=sampler.custom)
    specs = _as_specs(CONVERGENCE_METRICS if metrics is None else metrics)
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValueError('no sample sizes given')
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError('sample sizes must be strictly ascending, got {}'.format(n_list))
    if n_list[0] < 1 or n_list[-1] > MAX_SAMPLE_SIZE:
        raise ValueError('sample sizes must lie in [1, {}]'.format(MAX_SAMPLE_SIZE))
    if repetitions < 1:
        raise ValueError('repetitions must be >= 1')
    support_bound = n_list[-1]
    if sampler.is_discrete:
        support_bound = min(support_bound, len(sampler.distribution()))
    if any(m.kind != 'tv' for m in specs) and support_bound ** 2 > MAX_FLOW_EDGES:
        raise ValueError('n = {} gives up to {} transport edges, above the limit of {}'.format(
            n_list[-1], support_bound ** 2, MAX_FLOW_EDGES))

    tasks = [(sampler, n, rep, specs) for n in n_list for rep in range(repetitions)]
    results = _run_tasks(_convergence_task, tasks, jobs)
    frame = pd.DataFrame([row for rows in results for row in rows], columns=REPORT_COLS)
    report = ConvergenceReport(frame, sampler_kind=sampler.kind)
    means = report.means()
    for n in n_list:
        sub = means[means['n'] == n]
        logging.info('n = {}: '.format(n) + ', '.join(
            '{} {:.4g}'.format(metric, mean) for metric, mean in zip(sub['metric'], sub['mean'])))
    return report


def _random_outliers(mu, nu, rng, n_atoms=3):
    """a few atoms placed around the bounding box of mu and nu, random masses"""
    points = np.vstack([mu.points, nu.points])
    lo, hi = points.min(axis=0), points.max(axis=0)
    span = np.maximum(hi - lo, 1.0)
    outliers = lo - span + 3.0 * span * rng.random((n_atoms, mu.dim))
    return from_points(outliers, rng.dirichlet(np.ones(n_atoms)))


def outlier_experiment(mu, nu, nu_prime=None, delta_list=(0.01, 0.05, 0.2), p=2.0, k=1.0, seed=0, diameter=None):
    """
    Contaminate nu with delta mass of nu_prime and compare how far the (p,k)-RPW
    and W_p move. For every delta the RPW of the contaminated pair must satisfy
    rpw(mu, nu) - delta <= rpw(mu, nu~) <= (1 - delta) rpw(mu, nu) + delta;
    a violation raises RuntimeError. All distances are computed in one
    unit-diameter space covering the three supports.

    :param mu: DiscreteDistribution
    :param nu: DiscreteDistribution
    :param nu_prime: contaminating DiscreteDistribution; drawn at random when None
    :param delta_list: contamination weights in (0, 1)
    :param p: exponent
    :param k: slope parameter
    :param seed: seed for the random contamination
    :param diameter: common space diameter; default is the diameter of the three supports
    :return: DataFrame with OUTLIER_COLS
    """
    k_check(k)
    for delta in delta_list:
        if not 0 < delta < 1:
            raise ValueError('contamination weight must be in (0, 1), got {}'.format(delta))
    if nu_prime is None:
        nu_prime = _random_outliers(mu, nu, np.random.default_rng(seed))
    if not mu.dim == nu.dim == nu_prime.dim:
        raise ValueError('mu, nu and nu_prime must share one ambient space')
    if diameter is None:
        diameter = support_diameter(mu, nu, nu_prime)

    def measure(left, right):
        cm = normalize(cost_matrix(left, right, p), diameter)
        return rpw(left, right, cm, p, k).epsilon, wasserstein(left, right, cm, p)

    rpw_clean, wp_clean = measure(mu, nu)
    wp_outlier = measure(mu, nu_prime)[1]
    wp_shift = measure(nu, nu_prime)[1]
    rows = []
    for delta in delta_list:
        contaminated = nu.mixture(nu_prime, delta)
        rpw_cont, wp_cont = measure(mu, contaminated)
        lower = rpw_clean - delta
        upper = (1 - delta) * rpw_clean + delta
        if rpw_cont < lower - SANDWICH_TOL or rpw_cont > upper + SANDWICH_TOL:
            raise RuntimeError('contamination bound violated at delta = {}: {} not in [{}, {}]'.format(
                delta, rpw_cont, lower, upper))
        if math.isinf(p):
            convexity = max(wp_clean, wp_outlier)
            inflation = wp_shift
        else:
            convexity = ((1 - delta) * wp_clean ** p + delta * wp_outlier ** p) ** (1.0 / p)
            inflation = delta ** (1.0 / p) * wp_shift
        if k > 0:
            scale = min(delta, wp_cont / k)
            if scale > 0:
                logging.info('delta = {}: rpw / min(delta, W_p / k) = {:.4g}'.format(delta, rpw_cont / scale))
        rows.append([delta, rpw_clean, rpw_cont, lower, upper, wp_clean, wp_cont, convexity, inflation])
    return pd.DataFrame(rows, columns=OUTLIER_COLS)


def uniform_cell_masses(g, d=2):
    """cell masses of the uniform distribution on [0, 1]^d over a g^d grid"""
    return np.full((g,) * d, 1.0 / g ** d)


def grid_side(n, alpha):
    """number of cells per side of a grid with cell side about n^-alpha"""
    return max(1, int(math.ceil(n ** alpha - 1e-9)))


def _cell_counts(samples, g):
    """number of samples in each cell of a g^d grid on the unit cube"""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples.reshape(-1, 1)
    if samples.size == 0:
        raise ValueError('no samples given')
    if np.any(samples < 0) or np.any(samples > 1):
        raise ValueError('samples must lie in the unit cube')
    d = samples.shape[1]
    idx = np.minimum(np.floor(samples * g).astype(np.int64), g - 1)
    flat = np.ravel_multi_index(tuple(idx.T), (g,) * d)
    return np.bincount(flat, minlength=g ** d).reshape((g,) * d)


def _cell_masses(analytic_mu, g, d):
    masses = uniform_cell_masses(g, d) if analytic_mu is None else np.asarray(analytic_mu(g), dtype=np.float64)
    if masses.shape != (g,) * d:
        raise ValueError('cell masses have shape {}, expected {}'.format(masses.shape, (g,) * d))
    return masses


def grid_excess(samples, cell_exponent, analytic_mu=None):
    """
    Excess mass of a distribution over its empirical version on a grid of
    cell side n^-alpha: the sum over cells of max(0, mu(cell) - count(cell) / n).

    :param samples: (n, d) points in the unit cube
    :param cell_exponent: alpha; should be below 1/d for the excess to shrink
    :param analytic_mu: function g -> array of shape (g,)*d of exact cell masses; uniform by default
    :return: excess mass
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples.reshape(-1, 1)
    n, d = samples.shape
    if cell_exponent >= 1.0 / d:
        logging.warning('cell exponent {} >= 1/d = {}: the excess does not vanish with n'.format(
            cell_exponent, 1.0 / d))
    g = grid_side(n, cell_exponent)
    counts = _cell_counts(samples, g)
    return float(np.clip(_cell_masses(analytic_mu, g, d) - counts / n, 0.0, None).sum())


def two_grid_sides(n):
    """(fine, coarse) cells per side; the fine grid refines the coarse one"""
    coarse = grid_side(n, COARSE_EXPONENT)
    fine = coarse * int(math.ceil(n ** FINE_EXPONENT / coarse - 1e-9))
    return fine, coarse


def grid_transport_bound(samples, analytic_mu=None):
    """
    Two-grid transport plan from mu to the empirical distribution of `samples`
    on the unit square. First, every fine cell moves min(mu(cell), mu_n(cell))
    inside itself; then every coarse cell does the same with what is left.
    Mass moved inside a cell travels at most the cell diagonal.

    :param samples: (n, 2) points in the unit square
    :param analytic_mu: function g -> (g, g) array of exact cell masses; uniform by default
    :return: (untransported mass, upper bound on w_2 of the plan in unit-square units)
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise ValueError('the two-grid plan is built on the unit square (d = 2)')
    n = samples.shape[0]
    fine, coarse = two_grid_sides(n)
    mu_fine = _cell_masses(analytic_mu, fine, 2)
    emp_fine = _cell_counts(samples, fine) / n
    step_one = np.minimum(mu_fine, emp_fine)

    ratio = fine // coarse

    def coarsen(cells):
        return cells.reshape(coarse, ratio, coarse, ratio).sum(axis=(1, 3))

    step_two = np.minimum(coarsen(mu_fine - step_one), coarsen(emp_fine - step_one))
    moved_one, moved_two = float(step_one.sum()), float(step_two.sum())
    untransported = max(0.0, 1.0 - moved_one - moved_two)
    cost = math.sqrt(moved_one * 2.0 / fine ** 2 + moved_two * 2.0 / coarse ** 2)
    return untransported, cost


def certificate(untransported, cost_bound, diameter=math.sqrt(2.0)):
    """
    Upper bound on the (2,1)-RPW certified by a transport plan that leaves
    `untransported` mass behind at w_2 cost at most `cost_bound`.

    :param untransported: mass the plan does not move
    :param cost_bound: w_2 bound in the units of `diameter`
    :param diameter: diameter of the space (the unit square by default)
    :return: max(untransported, cost_bound / diameter)
    """
    return profile_point_bounds(untransported, cost_bound / diameter, 1.0)[1]


def grid_distribution(analytic_mu, g):
    """
    mu discretized to the centers of a g x g grid on the unit square

    :return: DiscreteDistribution
    """
    masses = _cell_masses(analytic_mu, g, 2)
    centers = (np.arange(g) + 0.5) / g
    xx, yy = np.meshgrid(centers, centers, indexing='ij')
    points = np.column_stack([xx.ravel(), yy.ravel()])
    keep = masses.ravel() > 0
    return from_points(points[keep], masses.ravel()[keep])


def exact_grid_rpw(samples, analytic_mu=None):
    """
    exact (2,1)-RPW between mu discretized on the fine grid of the two-grid plan
    and the empirical distribution of the samples, in unit-square units
    """
    samples = np.asarray(samples, dtype=np.float64)
    fine, _ = two_grid_sides(samples.shape[0])
    grid_mu = grid_distribution(analytic_mu, fine)
    emp = DiscreteDistribution(samples, np.full(samples.shape[0], 1.0 / samples.shape[0])).collapse()
    cm = normalize(cost_matrix(grid_mu, emp, 2.0), math.sqrt(2.0))
    return rpw(grid_mu, emp, cm, 2.0, 1.0).epsilon


def _grid_task(task):
    sampler, n, rep, alpha, exact_max_n = task
    samples = sampler.sample_points(n, sampler.rng(n, rep))
    excess = grid_excess(samples, alpha)
    untransported, cost = grid_transport_bound(samples)
    exact = exact_grid_rpw(samples) if n <= exact_max_n else np.nan
    return [n, rep, excess, untransported, cost, certificate(untransported, cost), exact]


def grid_experiment(n_list, alpha=0.25, seed=0, repetitions=N_REPETITIONS, exact_max_n=0, jobs=1):
    """
    Grid excess and two-grid certificate for empirical distributions of the
    uniform distribution on the unit square, with the exact (2,1)-RPW for
    sample sizes up to exact_max_n. A certificate below the exact value raises RuntimeError.

    :param n_list: sample sizes
    :param alpha: cell exponent of the excess grid
    :param seed: base seed
    :param repetitions: draws per sample size
    :param exact_max_n: largest n for the exact comparison (0 disables it)
    :param jobs: worker processes
    :return: DataFrame with GRID_COLS
    """
    sampler = SyntheticSampler('uniform_square', seed=seed, d=2)
    n_list = [int(n) for n in n_list]
    if not n_list or min(n_list) < 1 or max(n_list) > MAX_SAMPLE_SIZE:
        raise ValueError('sample sizes must lie in [1, {}]'.format(MAX_SAMPLE_SIZE))
    tasks = [(sampler, n, rep, alpha, exact_max_n) for n in n_list for rep in range(repetitions)]
    table = pd.DataFrame(_run_tasks(_grid_task, tasks, jobs), columns=GRID_COLS)
    unsound = table['exact_rpw'].notna() & (table['certificate'] < table['exact_rpw'] - SANDWICH_TOL)
    if unsound.any():
        raise RuntimeError('grid certificate below the exact RPW for n = {}'.format(
            sorted(table.loc[unsound, 'n'].unique().tolist())))
    for n in n_list:
        sub = table[table['n'] == n]
        logging.info('n = {}: excess {:.4g}, certificate {:.4g}'.format(
            n, sub['excess'].mean(), sub['certificate'].mean()))
    return table


def grid_slopes(table, min_n=100):
    """
    log-log slopes of the mean excess and mean certificate against n

    :param table: output of grid_experiment
    :param min_n: smallest n used in the fit
    :return: dict with keys 'excess' and 'certificate', each (slope, stderr)
    """
    means = table[table['n'] >= min_n].groupby('n')[['excess', 'certificate']].mean()
    return {col: loglog_fit(means.index.values, means[col].values) for col in ('excess', 'certificate')}
