import math
from collections import namedtuple

import numpy as np
import pandas as pd

from rpwmetric.modules.distributions import from_image
from rpwmetric.util.dist_io import read_image, read_labels

# one image of the benchmark
CorpusItem = namedtuple('CorpusItem', ['id', 'label', 'image'])


class LabeledCorpus:
    """
    Image-retrieval benchmark data: a labeled set that is searched and a set of
    queries whose labels are held out for scoring.
    """
    def __init__(self, items, queries, scenario='none'):
        """
        :param items: list of CorpusItem (the searchable, labeled set)
        :param queries: list of CorpusItem (labels used only for scoring)
        :param scenario: tag of the perturbation applied to the items
        """
        items, queries = list(items), list(queries)
        if not items or not queries:
            raise ValueError('corpus needs at least one item and one query')
        shapes = {np.shape(entry.image)[:2] for entry in items + queries}
        if len(shapes) != 1:
            raise ValueError('all images must share one size, got {}'.format(sorted(shapes)))
        for entry in items + queries:
            if entry.label is None or str(entry.label) == '':
                raise ValueError('image {} has no label'.format(entry.id))
        item_ids = [entry.id for entry in items]
        query_ids = [entry.id for entry in queries]
        if len(set(item_ids)) != len(item_ids) or len(set(query_ids)) != len(query_ids):
            raise ValueError('image ids must be unique')
        if set(item_ids) & set(query_ids):
            raise ValueError('labeled set and queries must be disjoint')
        self.items = items
        self.queries = queries
        self.scenario = scenario

    def __repr__(self):
        return 'LabeledCorpus(items={}, queries={}, scenario={})'.format(
            len(self.items), len(self.queries), self.scenario)

    @classmethod
    def load(cls, directory, n_labeled=200, n_queries=20, seed=0):
        """
        Read `labels.csv` (columns id, label, path; paths relative to the
        directory) and split the images at random into disjoint labeled and query sets.

        :param directory: corpus directory
        :param n_labeled: size of the labeled set
        :param n_queries: number of queries
        :param seed: seed of the split
        :return: LabeledCorpus
        """
        labels = read_labels(directory)
        if n_labeled + n_queries > labels.shape[0]:
            raise ValueError('asked for {} images but the corpus has {}'.format(
                n_labeled + n_queries, labels.shape[0]))
        order = np.random.default_rng(seed).permutation(labels.shape[0])
        chosen = labels.iloc[order[:n_labeled + n_queries]]
        entries = [CorpusItem(row.id, row.label, read_image(row.path)) for row in chosen.itertuples()]
        return cls(entries[:n_labeled], entries[n_labeled:])

    @property
    def image_shape(self):
        return np.shape(self.items[0].image)[:2]

    @property
    def diameter(self):
        """diagonal of the pixel-center grid, in from_image coordinates"""
        h, w = self.image_shape
        return math.hypot(h - 1, w - 1) / max(h, w)

    def item_distributions(self):
        return [from_image(entry.image) for entry in self.items]

    def query_distributions(self):
        return [from_image(entry.image) for entry in self.queries]

    def label_frequencies(self):
        """
        :return: Series of the fraction of labeled items carrying each label
        """
        return pd.Series([entry.label for entry in self.items]).value_counts(normalize=True)

    def with_items(self, items, scenario):
        """same queries, new labeled set"""
        return LabeledCorpus(items, self.queries, scenario=scenario)
