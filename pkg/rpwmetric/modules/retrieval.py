import logging
import math
import numpy as np
import pandas as pd

from rpwmetric.classes.LabeledCorpus import CorpusItem, LabeledCorpus
from rpwmetric.classes.MetricSpec import MetricSpec
from rpwmetric.classes.RetrievalReport import RetrievalReport
from rpwmetric.modules.rpw import distance_matrix
from rpwmetric.util.utils import RETRIEVAL_COLS, RETRIEVAL_DELTA, RETRIEVAL_METRICS

SCENARIOS = ['noise', 'shift', 'noise_and_shift']
NOISE_KINDS = ['pixel', 'white']

# largest noise added to one pixel, relative to the image maximum
NOISE_LEVEL = 0.1
# fraction of pixels turned white by the 'white' noise
WHITE_FRACTION = 0.1
SHIFT_ROWS = 2


def _add_noise(image, rng, noise):
    out = np.array(image, dtype=np.float64)
    top = out.max()
    flat = out.reshape(out.shape[0] * out.shape[1], -1)
    if noise == 'pixel':
        idx = rng.integers(flat.shape[0])
        flat[idx] += rng.uniform(0.0, NOISE_LEVEL * top)
    else:
        count = int(math.ceil(WHITE_FRACTION * flat.shape[0]))
        idx = rng.choice(flat.shape[0], size=count, replace=False)
        flat[idx] = top
    return flat.reshape(out.shape)


def _shift_up(image, rows, item_id):
    height = image.shape[0]
    if rows >= height:
        raise ValueError('cannot shift a {}-row image up by {} rows'.format(height, rows))
    out = np.zeros_like(image, dtype=np.float64)
    out[:height - rows] = image[rows:]
    if not np.any(out > 0):
        logging.warning('shifting image {} up by {} rows leaves it empty; keeping it unshifted'.format(
            item_id, rows))
        return np.array(image, dtype=np.float64)
    return out


def perturb(corpus, scenario, seed=0, noise='pixel', shift=SHIFT_ROWS):
    """
    Perturb the labeled images of a corpus; queries are left as they are.

    - noise: one uniformly chosen pixel gains U(0, 0.1 * image max) intensity
      (with noise='white', 10% of the pixels are set to the image max instead)
    - shift: every image moves up `shift` rows, the bottom rows fill with zeros
    - noise_and_shift: noise, then shift

    Masses are renormalized when the images are turned into distributions.

    :param corpus: LabeledCorpus of grayscale images
    :param scenario: one of SCENARIOS
    :param seed: seed of the noise
    :param noise: 'pixel' or 'white'
    :param shift: rows to shift
    :return: LabeledCorpus
    """
    if scenario not in SCENARIOS:
        raise ValueError('unknown scenario {}. Expected one of {}'.format(scenario, SCENARIOS))
    if noise not in NOISE_KINDS:
        raise ValueError('unknown noise {}. Expected one of {}'.format(noise, NOISE_KINDS))
    rng = np.random.default_rng(seed)
    items = []
    for entry in corpus.items:
        image = np.asarray(entry.image, dtype=np.float64)
        if scenario in ('noise', 'noise_and_shift'):
            image = _add_noise(image, rng, noise)
        if scenario in ('shift', 'noise_and_shift'):
            image = _shift_up(image, shift, entry.id)
        items.append(CorpusItem(entry.id, entry.label, image))
    return corpus.with_items(items, scenario)


def _as_spec(metric):
    if isinstance(metric, MetricSpec):
        return metric
    return MetricSpec.parse(metric, method='approx', delta=RETRIEVAL_DELTA)


def retrieve(corpus, metrics=None, m_max=None, jobs=1):
    """
    Nearest-neighbor retrieval: every query ranks the labeled set by ascending
    distance (ties by item id) and scores precision@m, the fraction of the m
    nearest items sharing its label, for m = 1..m_max. All distances are taken
    in the unit-diameter space of the pixel grid. RPW metrics given by name use
    the approximate profile with delta = 1e-3.

    :param corpus: LabeledCorpus
    :param metrics: metric names or MetricSpecs; default W1, W2, TV, RPW(2,1), RPW(2,0.1)
    :param m_max: largest m, at most the labeled set size (default: all of it)
    :param jobs: worker processes for the distance computations
    :return: RetrievalReport
    """
    specs = [_as_spec(m) for m in (RETRIEVAL_METRICS if metrics is None else metrics)]
    n_items = len(corpus.items)
    m_max = n_items if m_max is None else int(m_max)
    if not 1 <= m_max <= n_items:
        raise ValueError('m_max must be in [1, {}], got {}'.format(n_items, m_max))
    items = corpus.item_distributions()
    queries = corpus.query_distributions()
    item_ids = [str(entry.id) for entry in corpus.items]
    item_labels = np.array([entry.label for entry in corpus.items], dtype=object)
    ranks = np.arange(1, m_max + 1)
    rows = []
    for spec in specs:
        logging.info('retrieval with {} over {} queries'.format(spec.name, len(queries)))
        distances = distance_matrix(queries, items, spec, diameter=corpus.diameter, jobs=jobs)
        precision = np.zeros(m_max)
        for q, query in enumerate(corpus.queries):
            order = sorted(range(n_items), key=lambda i: (distances[q, i], item_ids[i]))
            hits = item_labels[order[:m_max]] == query.label
            precision += np.cumsum(hits) / ranks
        precision /= len(queries)
        rows.extend((spec.name, corpus.scenario, int(m), float(acc)) for m, acc in zip(ranks, precision))
    return RetrievalReport(pd.DataFrame(rows, columns=RETRIEVAL_COLS), scenario=corpus.scenario)


def _blob(size, center, rng, radius=2):
    image = np.zeros((size, size))
    r0, c0 = center
    rows = slice(max(r0 - radius, 0), min(r0 + radius + 1, size))
    cols = slice(max(c0 - radius, 0), min(c0 + radius + 1, size))
    block = image[rows, cols]
    image[rows, cols] = rng.uniform(128.0, 255.0, size=block.shape)
    return image


def blob_corpus(n_labeled=60, n_queries=15, size=24, seed=0):
    """
    Synthetic three-class image corpus: each image is a 5 x 5 blob of random
    intensities whose center is jittered by at most one pixel around a class
    position. Labels cycle through the classes.

    :param n_labeled: size of the labeled set
    :param n_queries: number of queries
    :param size: image side in pixels (at least 20)
    :param seed: seed
    :return: LabeledCorpus
    """
    if size < 20:
        raise ValueError('blob images need a side of at least 20 pixels')
    rng = np.random.default_rng(seed)
    anchors = [(5 * size // 24, 5 * size // 24),
               (5 * size // 24, 18 * size // 24),
               (18 * size // 24, 12 * size // 24)]

    def make(prefix, count):
        entries = []
        for idx in range(count):
            label = idx % len(anchors)
            jitter = rng.integers(-1, 2, size=2)
            center = (anchors[label][0] + int(jitter[0]), anchors[label][1] + int(jitter[1]))
            entries.append(CorpusItem('{}{:04d}'.format(prefix, idx), 'class{}'.format(label),
                                      _blob(size, center, rng)))
        return entries

    return LabeledCorpus(make('item', n_labeled), make('query', n_queries))
