import os

from rpwmetric.util.check_args import delta_check, k_check
from rpwmetric.util.utils import parse_exponent

SEED_ENV = 'RPW_SEED'


class RunConfig:
    """
    Validated settings of one command line run. Everything is checked here,
    before any file is read or any solver runs.
    """
    def __init__(self, command, inputs=(), p='2', k=1.0, delta=1e-3, seed=None, outfile=None, jobs=1,
                 environ=None, **options):
        """
        :param command: sub-command name
        :param inputs: input paths
        :param p: exponent as given on the command line ('inf' allowed)
        :param k: slope parameter >= 0
        :param delta: additive tolerance in (0, 0.5]
        :param seed: seed from --seed; RPW_SEED in the environment takes precedence, default 0
        :param outfile: output path
        :param jobs: worker processes, >= 1
        :param environ: environment mapping (os.environ by default)
        :param options: further command-specific settings, kept as attributes
        """
        environ = os.environ if environ is None else environ
        self.command = command
        self.inputs = [path for path in inputs if path]
        self.p = parse_exponent(p)
        k = float(k)
        k_check(k)
        self.k = k
        delta = float(delta)
        delta_check(delta, upper=0.5)
        self.delta = delta
        self.seed = self._resolve_seed(seed, environ)
        self.outfile = outfile
        jobs = int(jobs)
        if jobs < 1:
            raise ValueError('--jobs must be >= 1, got {}'.format(jobs))
        self.jobs = jobs
        for key, value in options.items():
            setattr(self, key, value)

    @staticmethod
    def _resolve_seed(seed, environ):
        raw = environ.get(SEED_ENV)
        if raw is not None and raw.strip() != '':
            try:
                return int(raw)
            except ValueError:
                raise ValueError('{} must be an integer, got {}'.format(SEED_ENV, raw))
        if seed is None:
            return 0
        seed = int(seed)
        if seed < 0:
            raise ValueError('seed must be >= 0, got {}'.format(seed))
        return seed

    @classmethod
    def from_args(cls, args, environ=None):
        """
        :param args: argparse Namespace with at least `command`
        :param environ: environment mapping
        :return: RunConfig
        """
        values = dict(vars(args))
        command = values.pop('command')
        inputs = [values.get(key) for key in ('mu_file', 'nu_file', 'nu_prime')]
        return cls(command, inputs=inputs, environ=environ, **values)

    def __repr__(self):
        return 'RunConfig({}, p={}, k={}, seed={})'.format(self.command, self.p, self.k, self.seed)
