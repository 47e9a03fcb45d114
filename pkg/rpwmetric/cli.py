import sys
import argparse
import logging
import math
import os
import time
import pkg_resources

# add rpwmetric parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from rpwmetric.classes.LabeledCorpus import LabeledCorpus
from rpwmetric.classes.MetricSpec import MetricSpec
from rpwmetric.classes.RunConfig import RunConfig
from rpwmetric.classes.SyntheticSampler import SyntheticSampler
from rpwmetric.modules.distributions import cost_matrix, normalize
from rpwmetric.modules.exact_ot import ot_profile
from rpwmetric.modules.experiments import convergence_experiment, grid_experiment, grid_slopes, \
    outlier_experiment
from rpwmetric.modules.retrieval import NOISE_KINDS, SCENARIOS, blob_corpus, perturb, retrieve
from rpwmetric.modules.rpw import levy_prokhorov, rpw, rpw_approx, rpw_binary_search, tv, \
    wasserstein
from rpwmetric.util import dist_io, experiment_io
from rpwmetric.util.utils import CONVERGENCE_METRICS, RETRIEVAL_METRICS, format_exponent

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARAMETER = 3
EXIT_SOLVER = 4


def cli():
    """
    Command line interface; main entry point to rpwmetric

    :return: exit code
    """
    # initialize logger
    logging.basicConfig(level=logging.INFO, format='%(message)s', stream=sys.stderr)
    args = parse_args_cli()
    sys.exit(run(args))


def run(args, environ=None):
    """
    validate the parsed arguments and run one command, mapping failures to exit codes

    :param args: argparse Namespace
    :param environ: environment mapping (os.environ by default)
    :return: exit code
    """
    commands = {'dist': cmd_dist, 'profile': cmd_profile, 'converge': cmd_converge,
                'outlier': cmd_outlier, 'grid': cmd_grid, 'retrieve': cmd_retrieve}
    try:
        config = RunConfig.from_args(args, environ=environ)
        return commands[config.command](config)
    except OSError as err:
        logging.error('I/O error: {}'.format(err))
        return EXIT_IO
    except ValueError as err:
        logging.error('invalid parameter: {}'.format(err))
        return EXIT_PARAMETER
    except RuntimeError as err:
        logging.error('solver failure: {}'.format(err))
        return EXIT_SOLVER


def _require_outfile(config):
    if not config.outfile:
        raise ValueError('--outfile is required for the {} command'.format(config.command))


def _read_pair(config):
    mu = dist_io.read_distribution(config.mu_file)
    nu = dist_io.read_distribution(config.nu_file)
    cm = normalize(cost_matrix(mu, nu, config.p), config.diameter)
    return mu, nu, cm


def cmd_dist(config):
    """
    distance between two distribution files; prints a JSON record to stdout
    """
    if config.metric == 'rpw' and config.method == 'approx' and math.isinf(config.p):
        raise ValueError('the approximate method needs a finite p')
    mu, nu, cm = _read_pair(config)
    start = time.perf_counter()
    if config.metric == 'rpw':
        if config.method == 'approx':
            result = rpw_approx(mu, nu, cm, config.p, config.k, config.delta)
        elif config.method == 'binary':
            result = rpw_binary_search(mu, nu, cm, config.p, config.k, config.delta)
        else:
            result = rpw(mu, nu, cm, config.p, config.k)
        record = result.to_dict()
    else:
        if config.metric == 'w':
            value = wasserstein(mu, nu, cm, config.p)
        elif config.metric == 'tv':
            value = tv(mu, nu)
        else:
            value = levy_prokhorov(mu, nu, cm)
        record = {'metric': config.metric, 'value': value, 'p': format_exponent(config.p),
                  'wall_time_ms': (time.perf_counter() - start) * 1000.0,
                  'n_mu': len(mu), 'n_nu': len(nu)}
    text = dist_io.write_json(record, config.outfile)
    print(text)
    return EXIT_OK


def cmd_profile(config):
    """
    export the OT-profile of two distribution files as CSV
    """
    if math.isinf(config.p):
        raise ValueError('the OT-profile needs a finite p; --p inf is not supported here')
    _require_outfile(config)
    mu, nu, cm = _read_pair(config)
    dist_io.write_profile(ot_profile(mu, nu, cm, config.p), config.outfile)
    return EXIT_OK


def cmd_converge(config):
    """
    convergence experiment on a synthetic distribution
    """
    _require_outfile(config)
    sampler = SyntheticSampler(config.sampler, seed=config.seed, d=config.d)
    metrics = [MetricSpec.parse(name, method=config.method, delta=config.delta) for name in config.metrics]
    report = convergence_experiment(sampler, config.n, metrics, repetitions=config.repetitions, jobs=config.jobs)
    experiment_io.write_report(report, config.outfile, summary_file=config.summary, svg_file=config.svg)
    return EXIT_OK


def cmd_outlier(config):
    """
    contamination experiment: table of RPW and W_p before and after mixing in outliers
    """
    _require_outfile(config)
    mu = dist_io.read_distribution(config.mu_file)
    nu = dist_io.read_distribution(config.nu_file)
    nu_prime = dist_io.read_distribution(config.nu_prime) if config.nu_prime else None
    table = outlier_experiment(mu, nu, nu_prime, config.deltas, p=config.p, k=config.k, seed=config.seed,
                               diameter=config.diameter)
    experiment_io.write_experiment_table(table, config.outfile)
    return EXIT_OK


def cmd_grid(config):
    """
    grid excess and two-grid certificate for uniform samples on the unit square
    """
    _require_outfile(config)
    table = grid_experiment(config.n, alpha=config.alpha, seed=config.seed, repetitions=config.repetitions,
                            exact_max_n=config.exact_max_n, jobs=config.jobs)
    experiment_io.write_experiment_table(table, config.outfile)
    if len(set(config.n)) >= 2:
        for name, (slope, stderr) in sorted(grid_slopes(table, min_n=min(config.n)).items()):
            logging.info('{} slope {:.4f} (stderr {:.4f})'.format(name, slope, stderr))
    return EXIT_OK


def cmd_retrieve(config):
    """
    perturb a labeled image corpus and score nearest-neighbor retrieval
    """
    _require_outfile(config)
    if config.corpus:
        corpus = LabeledCorpus.load(config.corpus, config.n_labeled, config.n_queries, seed=config.seed)
    else:
        logging.info('no corpus directory given; using the synthetic blob corpus')
        corpus = blob_corpus(config.n_labeled, config.n_queries, seed=config.seed)
    if config.scenario != 'none':
        corpus = perturb(corpus, config.scenario, seed=config.seed, noise=config.noise)
    metrics = [MetricSpec.parse(name, method=config.method, delta=config.delta) for name in config.metrics]
    report = retrieve(corpus, metrics, m_max=config.m_max, jobs=config.jobs)
    experiment_io.write_retrieval(report, config.outfile)
    for metric in report.metrics:
        logging.info('{}: accuracy@{} = {:.3f}'.format(metric, min(10, report.m_max),
                                                       report.accuracy(metric, min(10, report.m_max))))
    return EXIT_OK


def _version():
    try:
        return pkg_resources.require("rpwmetric")[0].version
    except pkg_resources.DistributionNotFound:
        return 'unknown (not installed)'


def parse_args_cli(argv=None):
    """
    parse the command line arguments
    :return: parsed arguments
    """
    parser = argparse.ArgumentParser(
        formatter_class=argparse.RawTextHelpFormatter,
        description="rpwmetric computes the (p,k)-RPW distance between discrete probability distributions: "
                    "a robust partial Wasserstein distance that is insensitive to a small fraction of outlier mass. "
                    "It also computes partial optimal transport, OT-profiles, total variation, "
                    "Levy-Prokhorov and p-Wasserstein distances, and runs the convergence, outlier, grid and "
                    "image-retrieval experiments.\n\n"
                    "Distribution files are CSV with columns x_1..x_d,mass and a header row.\n"
                    "Exit codes: 0 ok, 2 I/O or parse error, 3 invalid parameter, 4 solver failure.\n"
                    "The RPW_SEED environment variable overrides --seed.\n\n"
                    "Run `rpwmetric {dist,profile,converge,outlier,grid,retrieve} -h` for more information.")
    parser.add_argument('-v', '--version', action='version', version=_version())

    subparsers = parser.add_subparsers(title="commands", dest="command")
    parser_dist = subparsers.add_parser('dist',
        formatter_class=argparse.RawTextHelpFormatter,
        description="Distance between two distributions. Costs are Euclidean distances rescaled to a unit "
                    "diameter (the largest cost, or --diameter). Prints a JSON record.\n"
                    "For --metric rpw the record has epsilon, x_star, y_star, p, k, method, wall_time_ms, "
                    "n_mu and n_nu; other metrics report a value.")
    parser_profile = subparsers.add_parser('profile',
        formatter_class=argparse.RawTextHelpFormatter,
        description="Export the exact OT-profile of two distributions as CSV with columns "
                    "mass, p_power_cost, wp_value (wp_value is the p-th root of p_power_cost).")
    parser_converge = subparsers.add_parser('converge',
        formatter_class=argparse.RawTextHelpFormatter,
        description="Convergence experiment: distance between two independent empirical distributions "
                    "of the same source as the sample size grows, averaged over repetitions.\n"
                    "Writes a report CSV (metric, n, seed, value), and optionally a slope summary CSV "
                    "(metric, slope, stderr) and an SVG log-log plot.")
    parser_outlier = subparsers.add_parser('outlier',
        formatter_class=argparse.RawTextHelpFormatter,
        description="Contamination experiment: mix delta mass of an outlier distribution into nu and "
                    "compare how far the RPW and W_p move. Fails (exit 4) if the RPW leaves "
                    "[rpw - delta, (1 - delta) rpw + delta].")
    parser_grid = subparsers.add_parser('grid',
        formatter_class=argparse.RawTextHelpFormatter,
        description="Grid excess mass and the two-grid transport certificate for uniform samples on the "
                    "unit square, optionally compared against the exact (2,1)-RPW.")
    parser_retrieve = subparsers.add_parser('retrieve',
        formatter_class=argparse.RawTextHelpFormatter,
        description="Image retrieval benchmark. The corpus directory holds images (PGM or CSV) and "
                    "labels.csv with columns id,label,path. Without --corpus a synthetic three-class "
                    "blob corpus is used. Writes precision@m per metric as CSV "
                    "(metric, scenario, m, accuracy).")

    # parameters shared by all commands
    for par in (parser_dist, parser_profile, parser_converge, parser_outlier, parser_grid, parser_retrieve):
        common = par.add_argument_group('Arguments common to all commands')
        common.add_argument('--seed', type=int, default=None,
                            help='Random seed. The default is 0; RPW_SEED overrides it.')
        common.add_argument('--jobs', type=int, default=1,
                            help='Number of worker processes. The default is 1.')
        common.add_argument('--outfile', default=None,
                            help='Output file.')

    for par in (parser_dist, parser_profile, parser_outlier):
        par.add_argument('mu_file', help='CSV of the first distribution.')
        par.add_argument('nu_file', help='CSV of the second distribution.')
        par.add_argument('--p', default='2',
                         help='Exponent p >= 1, or inf. The default is 2.')
        par.add_argument('--diameter', type=float, default=None,
                         help='Diameter of the space; costs are divided by it. '
                              'The default is the largest cost.')

    for par in (parser_dist, parser_outlier):
        par.add_argument('--k', type=float, default=1.0,
                         help='Slope parameter k >= 0 of the RPW. The default is 1.')

    for par, method in ((parser_dist, 'exact'), (parser_converge, 'exact'), (parser_retrieve, 'approx')):
        par.add_argument('--method', choices=['exact', 'approx', 'binary'], default=method,
                         help='How RPW is computed: exact profile intersection, truncated profile '
                              '(within --delta), or binary search (within --delta). '
                              'The default is {}.'.format(method))
        par.add_argument('--delta', type=float, default=1e-3,
                         help='Additive tolerance of the approx and binary methods. The default is 1e-3.')

    # ---- DIST ---- #
    parser_dist.add_argument('--metric', choices=['rpw', 'w', 'tv', 'lp'], default='rpw',
                             help='rpw: (p,k)-RPW; w: p-Wasserstein; tv: total variation; '
                                  'lp: Levy-Prokhorov. The default is rpw.')

    # ---- CONVERGE ---- #
    parser_converge.add_argument('--sampler', choices=['two_point', 'grid4x4', 'uniform_square'],
                                 default='two_point',
                                 help='Source distribution. The default is two_point.')
    parser_converge.add_argument('--d', type=int, default=2,
                                 help='Dimension (two_point and uniform_square). The default is 2.')
    parser_converge.add_argument('--n', type=int, nargs='+', default=[10, 100, 1000, 10000, 100000],
                                 help='Ascending sample sizes. The default is 10 100 1000 10000 100000.')
    parser_converge.add_argument('--metrics', nargs='+', default=CONVERGENCE_METRICS,
                                 help='Metric names: W<p>, TV, LP or RPW(p,k). The default is ' +
                                      ' '.join(CONVERGENCE_METRICS) + '.')
    parser_converge.add_argument('--repetitions', type=int, default=10,
                                 help='Repetitions per sample size. The default is 10.')
    parser_converge.add_argument('--summary', default=None,
                                 help='Optional summary CSV with fitted log-log slopes.')
    parser_converge.add_argument('--svg', default=None,
                                 help='Optional SVG log-log plot.')

    # ---- OUTLIER ---- #
    parser_outlier.add_argument('--nu_prime', default=None,
                                help='CSV of the outlier distribution. If missing, a few random outlier '
                                     'atoms are drawn with --seed.')
    parser_outlier.add_argument('--deltas', type=float, nargs='+', default=[0.01, 0.05, 0.2],
                                help='Contamination weights in (0, 1). The default is 0.01 0.05 0.2.')

    # ---- GRID ---- #
    parser_grid.add_argument('--n', type=int, nargs='+', default=[100, 1000, 10000, 100000],
                             help='Sample sizes. The default is 100 1000 10000 100000.')
    parser_grid.add_argument('--alpha', type=float, default=0.25,
                             help='Cell exponent of the excess grid (cell side n^-alpha). The default is 0.25.')
    parser_grid.add_argument('--repetitions', type=int, default=10,
                             help='Repetitions per sample size. The default is 10.')
    parser_grid.add_argument('--exact_max_n', type=int, default=0,
                             help='Compare the certificate with the exact RPW up to this n. '
                                  'The default 0 skips the comparison.')

    # ---- RETRIEVE ---- #
    parser_retrieve.add_argument('--corpus', default=None,
                                 help='Corpus directory with labels.csv.')
    parser_retrieve.add_argument('--n_labeled', type=int, default=200,
                                 help='Size of the labeled set. The default is 200.')
    parser_retrieve.add_argument('--n_queries', type=int, default=20,
                                 help='Number of queries. The default is 20.')
    parser_retrieve.add_argument('--scenario', choices=['none'] + SCENARIOS, default='noise_and_shift',
                                 help='Perturbation of the labeled images. The default is noise_and_shift.')
    parser_retrieve.add_argument('--noise', choices=NOISE_KINDS, default='pixel',
                                 help='pixel: noise on one random pixel; white: 10%% of pixels set to the '
                                      'maximum. The default is pixel.')
    parser_retrieve.add_argument('--metrics', nargs='+', default=RETRIEVAL_METRICS,
                                 help='Metric names. The default is ' + ' '.join(RETRIEVAL_METRICS) + '.')
    parser_retrieve.add_argument('--m_max', type=int, default=None,
                                 help='Largest number of retrieved images. The default is the labeled set size.')

    if argv is None and len(sys.argv) == 1:
        parser.print_help(sys.stderr)
        sys.exit(1)
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        sys.exit(1)
    return args


if __name__ == "__main__":
    cli()
