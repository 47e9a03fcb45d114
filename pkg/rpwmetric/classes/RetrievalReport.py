import pandas as pd

from rpwmetric.util.utils import RETRIEVAL_COLS


class RetrievalReport:
    """
    precision@m of nearest-neighbor retrieval, per metric and m, averaged over queries
    """
    def __init__(self, frame, scenario='none'):
        """
        :param frame: DataFrame with columns metric, scenario, m, accuracy
        :param scenario: perturbation tag of the labeled set
        """
        missing = set(RETRIEVAL_COLS) - set(frame.columns)
        if missing:
            raise ValueError('report is missing columns {}'.format(sorted(missing)))
        if ((frame['accuracy'] < 0) | (frame['accuracy'] > 1)).any():
            raise ValueError('accuracies must lie in [0, 1]')
        self.frame = frame[RETRIEVAL_COLS].reset_index(drop=True)
        self.scenario = scenario

    @property
    def metrics(self):
        return list(pd.unique(self.frame['metric']))

    @property
    def m_max(self):
        return int(self.frame['m'].max())

    def accuracy(self, metric, m):
        """
        :param metric: metric name, e.g. 'RPW(2,1)'
        :param m: number of retrieved images
        :return: average precision@m
        """
        row = self.frame[(self.frame['metric'] == metric) & (self.frame['m'] == m)]
        if row.empty:
            raise ValueError('no accuracy for {} at m = {}'.format(metric, m))
        return float(row['accuracy'].values[0])

    def curve(self, metric):
        """accuracy against m for one metric"""
        sub = self.frame[self.frame['metric'] == metric]
        return sub.set_index('m')['accuracy']
