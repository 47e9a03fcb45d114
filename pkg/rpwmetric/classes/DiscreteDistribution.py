import numpy as np
import pandas as pd

from rpwmetric.util.utils import MASS_TOL


class DiscreteDistribution:
    """
    A probability distribution supported on finitely many points of R^d.
    Duplicate points are legal and are kept as separate atoms.
    Instances are immutable: the point and mass arrays are read-only.
    """
    def __init__(self, points, masses):
        """
        Build a DiscreteDistribution. Masses must already sum to 1;
        use rpwmetric.modules.distributions.from_points to rescale arbitrary weights.

        :param points: array-like of shape (n, d), or (n,) for d = 1
        :param masses: array-like of shape (n,)
        """
        points = np.array(points, dtype=np.float64)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2:
            raise ValueError('points must all have the same dimension d')
        masses = np.array(masses, dtype=np.float64).reshape(-1)
        if points.shape[0] == 0:
            raise ValueError('empty support')
        if points.shape[0] != masses.shape[0]:
            raise ValueError('got {} points but {} masses'.format(points.shape[0], masses.shape[0]))
        if np.any(masses < 0):
            raise ValueError('masses must be non-negative')
        if abs(masses.sum() - 1.0) > MASS_TOL:
            raise ValueError('masses sum to {}, expected 1'.format(masses.sum()))
        points.setflags(write=False)
        masses.setflags(write=False)
        self.points = points
        self.masses = masses

    def __len__(self):
        return self.masses.shape[0]

    def __repr__(self):
        return 'DiscreteDistribution(n={}, d={})'.format(len(self), self.dim)

    @property
    def dim(self):
        return self.points.shape[1]

    def to_frame(self):
        """
        :return: DataFrame with columns x_1..x_d, mass (one row per atom)
        """
        df = pd.DataFrame(self.points, columns=['x_' + str(i + 1) for i in range(self.dim)])
        df['mass'] = self.masses
        return df

    def collapse(self):
        """
        Merge atoms at identical coordinates, summing their masses.
        Every transport quantity depends only on locations, so the result
        has the same distances to any other distribution.

        :return: DiscreteDistribution with distinct support points, sorted lexicographically
        """
        unique, inverse = np.unique(self.points, axis=0, return_inverse=True)
        merged = np.bincount(inverse.reshape(-1), weights=self.masses, minlength=unique.shape[0])
        return DiscreteDistribution(unique, merged / merged.sum())

    def mixture(self, other, delta):
        """
        (1 - delta) * self + delta * other, on the union of both supports

        :param other: DiscreteDistribution of the same dimension
        :param delta: weight of other, in [0, 1]
        :return: DiscreteDistribution
        """
        if other.dim != self.dim:
            raise ValueError('dimension mismatch: {} vs {}'.format(self.dim, other.dim))
        if not 0 <= delta <= 1:
            raise ValueError('mixture weight must be in [0, 1], got {}'.format(delta))
        points = np.vstack([self.points, other.points])
        masses = np.concatenate([(1 - delta) * self.masses, delta * other.masses])
        return DiscreteDistribution(points, masses / masses.sum())

    def mass_by_location(self):
        """
        total mass at each distinct location, keyed by the coordinate tuple

        :return: pandas Series indexed by coordinate columns
        """
        df = self.to_frame()
        coords = [c for c in df.columns if c != 'mass']
        return df.groupby(coords)['mass'].sum()
