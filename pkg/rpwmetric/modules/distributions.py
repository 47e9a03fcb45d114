import logging
import numpy as np
from scipy.spatial.distance import cdist, pdist

from rpwmetric.classes.CostMatrix import CostMatrix
from rpwmetric.classes.DiscreteDistribution import DiscreteDistribution
from rpwmetric.util.utils import MASS_TOL


def from_points(points, masses):
    """
    Build a DiscreteDistribution from arbitrary non-negative weights,
    rescaling them to sum to exactly 1.

    :param points: coordinate list, shape (n, d) or (n,)
    :param masses: non-negative weights, shape (n,)
    :return: DiscreteDistribution
    """
    masses = np.asarray(masses, dtype=np.float64).reshape(-1)
    if masses.size == 0:
        raise ValueError('empty support')
    if np.any(masses < 0):
        raise ValueError('masses must be non-negative')
    total = masses.sum()
    if total <= 0:
        raise ValueError('masses must have a positive sum')
    return DiscreteDistribution(points, masses / total)


def from_image(pixels):
    """
    Turn an intensity grid into a distribution over pixel centers.
    Pixel (r, c) of an H x W image sits at (r / max(H, W), c / max(H, W)),
    so the support fits the unit square. Mass is proportional to intensity
    and zero-intensity pixels are left out of the support.
    Color images (H x W x channels) are averaged to grayscale first.

    :param pixels: array-like of shape (H, W) or (H, W, C)
    :return: DiscreteDistribution
    """
    img = np.asarray(pixels, dtype=np.float64)
    if img.ndim == 3:
        img = img.mean(axis=2)
    if img.ndim != 2 or img.size == 0:
        raise ValueError('image must be a non-empty 2-d intensity grid, got shape {}'.format(img.shape))
    if np.any(img < 0) or np.any(np.isnan(img)):
        raise ValueError('image intensities must be non-negative')
    rows, cols = np.nonzero(img > 0)
    if rows.size == 0:
        raise ValueError('image is all zero; it has no mass to normalize')
    side = float(max(img.shape))
    points = np.column_stack([rows / side, cols / side])
    return from_points(points, img[rows, cols])


def cost_matrix(mu, nu, p=1.0):
    """
    Euclidean ground distances between the supports of mu and nu.

    :param mu: DiscreteDistribution (rows)
    :param nu: DiscreteDistribution (columns)
    :param p: exponent carried along with the matrix
    :return: CostMatrix
    """
    if mu.dim != nu.dim:
        raise ValueError('dimension mismatch: {} vs {}'.format(mu.dim, nu.dim))
    return CostMatrix(cdist(mu.points, nu.points, metric='euclidean'), p=p)


def normalize(cm, diameter=None):
    """
    Rescale a cost matrix to a unit-diameter space. By default the diameter is
    the largest entry; pass `diameter` to use the diameter of a larger common
    space (e.g. the unit square for images), which keeps distances between
    several pairs comparable. A matrix that is already normalized is returned as is.
    An all-zero matrix is returned unchanged with the degenerate flag set.

    :param cm: CostMatrix
    :param diameter: optional diameter of the ambient space, >= cm.diameter
    :return: normalized CostMatrix
    """
    if cm.normalized or cm.degenerate:
        return cm
    scale = cm.diameter if diameter is None else float(diameter)
    if scale < cm.diameter * (1 - MASS_TOL):
        raise ValueError('diameter {} is smaller than the largest cost {}'.format(scale, cm.diameter))
    if scale <= 0:
        logging.info('All ground distances are 0; treating the cost matrix as degenerate')
        return CostMatrix(cm.costs, p=cm.p, scale=cm.scale, normalized=False, degenerate=True)
    costs = np.minimum(cm.costs / scale, 1.0)
    return CostMatrix(costs, p=cm.p, scale=cm.scale * scale, normalized=True)


def support_diameter(*dists):
    """
    largest Euclidean distance between any two support points of the given
    distributions (co-located atoms are merged first)

    :param dists: DiscreteDistribution objects of one dimension
    :return: diameter
    """
    if not dists:
        raise ValueError('no distributions given')
    dims = {d.dim for d in dists}
    if len(dims) != 1:
        raise ValueError('dimension mismatch: {}'.format(sorted(dims)))
    points = np.unique(np.vstack([d.points for d in dists]), axis=0)
    if points.shape[0] < 2:
        return 0.0
    return float(pdist(points).max())
