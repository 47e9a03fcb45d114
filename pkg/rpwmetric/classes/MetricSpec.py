import math
import re

from rpwmetric.util.utils import parse_exponent, format_exponent, RETRIEVAL_DELTA
from rpwmetric.util.check_args import k_check, delta_check

RPW_PATTERN = re.compile(r'^RPW\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)$', re.IGNORECASE)
W_PATTERN = re.compile(r'^W_?(inf|[0-9.]+)$', re.IGNORECASE)

RPW_METHODS = ['exact', 'approx', 'binary']


class MetricSpec:
    """
    A named distance between distributions, as used by the batch and
    retrieval drivers: 'W1', 'W2', 'Winf', 'TV', 'LP' or 'RPW(p,k)'.
    """
    def __init__(self, kind, p=None, k=None, method='exact', delta=RETRIEVAL_DELTA):
        """
        :param kind: one of 'w', 'tv', 'lp', 'rpw'
        :param p: exponent (w and rpw)
        :param k: slope parameter (rpw only)
        :param method: 'exact', 'approx' or 'binary' (rpw only)
        :param delta: additive tolerance for the approx and binary methods
        """
        if kind not in ('w', 'tv', 'lp', 'rpw'):
            raise ValueError('unknown metric kind {}'.format(kind))
        if method not in RPW_METHODS:
            raise ValueError('method must be one of {}, got {}'.format(RPW_METHODS, method))
        if kind in ('w', 'rpw') and p is None:
            raise ValueError('{} needs an exponent p'.format(kind))
        if kind == 'rpw':
            k_check(k)
            if method != 'exact':
                delta_check(delta, upper=0.5)
        self.kind = kind
        self.p = p
        self.k = k
        self.method = method
        self.delta = delta

    @classmethod
    def parse(cls, name, method='exact', delta=RETRIEVAL_DELTA):
        """
        parse a metric name such as 'W2', 'Winf', 'TV', 'LP' or 'RPW(2,0.1)'

        :param name: metric name
        :param method: RPW method used when name is an RPW
        :param delta: tolerance for non-exact RPW methods
        :return: MetricSpec
        """
        name = name.strip()
        upper = name.upper()
        if upper == 'TV':
            return cls('tv')
        if upper == 'LP':
            return cls('lp')
        w_match = W_PATTERN.match(name)
        if w_match:
            return cls('w', p=parse_exponent(w_match.group(1)))
        rpw_match = RPW_PATTERN.match(name)
        if rpw_match:
            p = parse_exponent(rpw_match.group(1))
            try:
                k = float(rpw_match.group(2))
            except ValueError:
                raise ValueError('bad k in metric name {}'.format(name))
            if math.isinf(p) and method == 'approx':
                method = 'exact'
            return cls('rpw', p=p, k=k, method=method, delta=delta)
        raise ValueError('unknown metric {}. Expected W<p>, TV, LP or RPW(p,k)'.format(name))

    @property
    def name(self):
        if self.kind == 'tv':
            return 'TV'
        if self.kind == 'lp':
            return 'LP'
        if self.kind == 'w':
            return 'W' + format_exponent(self.p)
        return 'RPW({},{:g})'.format(format_exponent(self.p), self.k)

    def __repr__(self):
        return 'MetricSpec({}, method={})'.format(self.name, self.method)

    def __eq__(self, other):
        return isinstance(other, MetricSpec) and repr(self) == repr(other)

    def __hash__(self):
        return hash(repr(self))
