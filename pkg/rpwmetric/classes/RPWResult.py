import json

from rpwmetric.util.utils import format_exponent

METHODS = ('profile_intersection', 'binary_search', 'approx_profile', 'total_variation')


class RPWResult:
    """
    The (p,k)-RPW value eps* together with the crossing point
    (x*, y*) = (1 - eps*, k * eps*) of the OT-profile with the line y = k(1 - x).
    """
    def __init__(self, epsilon, p, k, method, n_mu=None, n_nu=None, wall_time_ms=None):
        """
        :param epsilon: the distance, in [0, 1]
        :param p: exponent
        :param k: slope parameter
        :param method: which algorithm produced the value (see METHODS)
        :param n_mu: support size of the first distribution
        :param n_nu: support size of the second distribution
        :param wall_time_ms: computation time
        """
        if method not in METHODS:
            raise ValueError('unknown method {}. Expected one of {}'.format(method, METHODS))
        self.epsilon = min(max(float(epsilon), 0.0), 1.0)
        self.p = p
        self.k = k
        self.method = method
        self.n_mu = n_mu
        self.n_nu = n_nu
        self.wall_time_ms = wall_time_ms

    def __repr__(self):
        return 'RPWResult(epsilon={:.12g}, p={}, k={}, method={})'.format(
            self.epsilon, format_exponent(self.p), self.k, self.method)

    @property
    def crossing(self):
        return self.x_star, self.y_star

    @property
    def x_star(self):
        return 1.0 - self.epsilon

    @property
    def y_star(self):
        return self.k * self.epsilon

    def to_dict(self):
        return {'epsilon': self.epsilon,
                'x_star': self.x_star,
                'y_star': self.y_star,
                'p': format_exponent(self.p),
                'k': self.k,
                'method': self.method,
                'wall_time_ms': self.wall_time_ms,
                'n_mu': self.n_mu,
                'n_nu': self.n_nu}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)
