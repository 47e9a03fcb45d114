import math
import numpy as np

from rpwmetric.classes.DiscreteDistribution import DiscreteDistribution
from rpwmetric.modules.distributions import support_diameter

SAMPLER_KINDS = ['two_point', 'grid4x4', 'uniform_square', 'custom']


class SyntheticSampler:
    """
    Source of i.i.d. samples for the convergence and grid experiments.

    - two_point: atoms a = (0, .., 0) and b = (1, 0, .., 0), mass 1/2 each
    - grid4x4: 16 atoms of mass 1/16 at the cell centers of a 4 x 4 lattice on the unit square
    - uniform_square: the uniform distribution on [0, 1]^d
    - custom: any DiscreteDistribution
    """
    def __init__(self, kind, seed=0, d=2, custom=None):
        """
        :param kind: one of SAMPLER_KINDS
        :param seed: base seed; every (n, repetition) draw gets its own generator
        :param d: ambient dimension (grid4x4 is always 2-d)
        :param custom: DiscreteDistribution, required for kind 'custom'
        """
        if kind not in SAMPLER_KINDS:
            raise ValueError('unknown sampler {}. Expected one of {}'.format(kind, SAMPLER_KINDS))
        if int(d) < 1:
            raise ValueError('dimension must be >= 1, got {}'.format(d))
        if kind == 'grid4x4' and d != 2:
            raise ValueError('grid4x4 lives in 2 dimensions')
        if kind == 'custom' and custom is None:
            raise ValueError('custom sampler needs a distribution')
        self.kind = kind
        self.seed = int(seed)
        self.d = custom.dim if kind == 'custom' else int(d)
        self.custom = custom

    def __repr__(self):
        return 'SyntheticSampler({}, seed={}, d={})'.format(self.kind, self.seed, self.d)

    @property
    def is_discrete(self):
        return self.kind != 'uniform_square'

    def distribution(self):
        """
        the sampled population as a DiscreteDistribution (not available for uniform_square)
        """
        if self.kind == 'two_point':
            points = np.zeros((2, self.d))
            points[1, 0] = 1.0
            return DiscreteDistribution(points, [0.5, 0.5])
        if self.kind == 'grid4x4':
            centers = (np.arange(4) + 0.5) / 4.0
            xx, yy = np.meshgrid(centers, centers, indexing='ij')
            points = np.column_stack([xx.ravel(), yy.ravel()])
            return DiscreteDistribution(points, np.full(16, 1.0 / 16))
        if self.kind == 'custom':
            return self.custom
        raise ValueError('uniform_square is continuous; it has no finite support')

    @property
    def diameter(self):
        """
        diameter of the space the samples live in, used to normalize costs
        """
        if self.kind == 'two_point':
            return 1.0
        if self.kind == 'grid4x4':
            return 0.75 * math.sqrt(2.0)
        if self.kind == 'uniform_square':
            return math.sqrt(self.d)
        return support_diameter(self.custom)

    def rng(self, n, rep):
        """
        generator for repetition `rep` at sample size `n`; independent of the
        order in which (n, rep) tasks are run
        """
        return np.random.default_rng([self.seed, int(n), int(rep)])

    def sample_points(self, n, rng):
        """
        :param n: number of samples
        :param rng: numpy Generator
        :return: ndarray (n, d)
        """
        if n < 1:
            raise ValueError('sample size must be >= 1, got {}'.format(n))
        if self.kind == 'uniform_square':
            return rng.random((n, self.d))
        population = self.distribution()
        idx = rng.choice(len(population), size=n, p=population.masses)
        return population.points[idx]

    def empirical(self, n, rng):
        """
        empirical distribution: mass 1/n on each of n samples, duplicates kept

        :param n: number of samples
        :param rng: numpy Generator
        :return: DiscreteDistribution
        """
        return DiscreteDistribution(self.sample_points(n, rng), np.full(n, 1.0 / n))
