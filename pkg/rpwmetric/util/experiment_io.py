import os

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from rpwmetric.util.dist_io import write_table, atomic_write
from rpwmetric.util.utils import REPORT_COLS, RETRIEVAL_COLS, SUMMARY_COLS

# fixed SVG ids and no timestamp, so reruns give identical files
matplotlib.rcParams['svg.hashsalt'] = 'rpwmetric'


def write_report(report, outfile, summary_file=None, svg_file=None):
    """
    write a ConvergenceReport: the per-repetition table, and optionally the
    slope summary and a log-log plot of the means

    :param report: ConvergenceReport
    :param outfile: path of the report CSV (metric, n, seed, value)
    :param summary_file: path of the summary CSV (metric, slope, stderr), or None
    :param svg_file: path of the SVG plot, or None
    :return: None
    """
    write_table(report.frame[REPORT_COLS], outfile, float_format='%.17g')
    if summary_file:
        write_table(report.slopes()[SUMMARY_COLS], summary_file)
    if svg_file:
        plot_convergence(report, svg_file)


def plot_convergence(report, svg_file):
    """
    log-log plot of mean distance against sample size, one line per metric

    :param report: ConvergenceReport
    :param svg_file: output path (.svg)
    :return: None
    """
    means = report.means()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for metric in report.metrics:
        sub = means[(means['metric'] == metric) & (means['mean'] > 0)]
        ax.plot(sub['n'], sub['mean'], marker='o', label=metric)
    ax.set_xscale('log')
    ax.set_yscale('log')
    ax.set_xlabel('sample size n')
    ax.set_ylabel('mean distance')
    if report.sampler_kind:
        ax.set_title(report.sampler_kind)
    ax.grid(True, which='both', alpha=0.3)
    ax.legend(loc='best', fontsize=8)
    atomic_write(svg_file, lambda tmp: fig.savefig(tmp, format='svg', metadata={'Date': None}))
    plt.close(fig)


def write_retrieval(report, outfile):
    """
    :param report: RetrievalReport
    :param outfile: path of the CSV (metric, scenario, m, accuracy)
    :return: None
    """
    write_table(report.frame[RETRIEVAL_COLS], outfile)


def write_experiment_table(df, outfile):
    """write an outlier or grid experiment table"""
    if os.path.isdir(outfile):
        raise IOError('output path {} is a directory'.format(outfile))
    write_table(df, outfile)
