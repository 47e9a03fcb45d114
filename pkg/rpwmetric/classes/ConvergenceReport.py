import logging
import numpy as np
import pandas as pd
import statsmodels.api as sm

from rpwmetric.util.utils import REPORT_COLS, SUMMARY_COLS

# rows with fewer samples are pre-asymptotic and left out of slope fits
MIN_FIT_N = 100


class ConvergenceReport:
    """
    Per-repetition distances between two independent empirical distributions,
    for several metrics and sample sizes, with log-log slope fits of the means.
    """
    def __init__(self, frame, sampler_kind=None):
        """
        :param frame: DataFrame with columns metric, n, seed, value
            (seed is the repetition number)
        :param sampler_kind: name of the sampled distribution, for logs and plots
        """
        missing = set(REPORT_COLS) - set(frame.columns)
        if missing:
            raise ValueError('report is missing columns {}'.format(sorted(missing)))
        self.frame = frame[REPORT_COLS].sort_values(['metric', 'n', 'seed'], kind='mergesort')\
            .reset_index(drop=True)
        self.sampler_kind = sampler_kind

    @property
    def metrics(self):
        return list(pd.unique(self.frame['metric']))

    @property
    def sizes(self):
        return sorted(self.frame['n'].unique().tolist())

    def means(self):
        """
        :return: DataFrame with columns metric, n, mean, stderr, count
        """
        grouped = self.frame.groupby(['metric', 'n'], sort=True)['value']
        out = grouped.agg(['mean', 'std', 'count']).reset_index()
        out['stderr'] = out['std'].fillna(0.0) / np.sqrt(out['count'])
        return out[['metric', 'n', 'mean', 'stderr', 'count']]

    def mean_curve(self, metric):
        """
        :param metric: metric name
        :return: Series of mean distance indexed by n
        """
        means = self.means()
        curve = means[means['metric'] == metric].set_index('n')['mean']
        if curve.empty:
            raise ValueError('no rows for metric {}'.format(metric))
        return curve

    def slopes(self, min_n=MIN_FIT_N):
        """
        Least-squares fit of log(mean distance) on log(n) per metric,
        over sample sizes n >= min_n. Zero means cannot be logged and are dropped.

        :param min_n: smallest sample size used in the fit
        :return: DataFrame with columns metric, slope, stderr
        """
        means = self.means()
        rows = []
        for metric in self.metrics:
            sub = means[(means['metric'] == metric) & (means['n'] >= min_n)]
            zero = sub['mean'] <= 0
            if zero.any():
                logging.warning('{}: dropping {} zero means from the slope fit'.format(metric, int(zero.sum())))
                sub = sub[~zero]
            if sub.shape[0] < 2:
                logging.warning('{}: fewer than 2 sample sizes to fit a slope'.format(metric))
                rows.append({'metric': metric, 'slope': np.nan, 'stderr': np.nan})
                continue
            slope, stderr = loglog_fit(sub['n'].values, sub['mean'].values)
            rows.append({'metric': metric, 'slope': slope, 'stderr': stderr})
        return pd.DataFrame(rows, columns=SUMMARY_COLS)

    def slope(self, metric, min_n=MIN_FIT_N):
        table = self.slopes(min_n)
        return float(table.loc[table['metric'] == metric, 'slope'].values[0])


def loglog_fit(x, y):
    """
    ordinary least squares of log(y) on log(x)

    :param x: positive abscissae (sample sizes)
    :param y: positive values
    :return: (slope, standard error of the slope); the error is nan for two points
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise ValueError('log-log fit needs at least 2 positive points')
    fit = sm.OLS(np.log(y), sm.add_constant(np.log(x))).fit()
    stderr = float(fit.bse[1]) if x.size > 2 else np.nan
    return float(fit.params[1]), stderr
