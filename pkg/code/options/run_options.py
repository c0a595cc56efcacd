import argparse

from scenarios.definition import ROUTES
from scenarios.report import FORMATS
from utils import DENSE_CAP

parser = argparse.ArgumentParser(description='Spin-1/2 ensembles: means and variances by several routes')

parser.add_argument('--log-level', default='WARNING', type=str.upper,
                    choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='logging level (logs go to stderr)')

parser.add_argument('-v', '--verbose', action='store_true', help='print a summary of each resolved scenario')

commands = parser.add_subparsers(dest='command', required=True)

run = commands.add_parser('run', help='run scenario files or built-in scenarios')

run.add_argument('targets', nargs='+', help='scenario files, built-in names, or "all"')

run.add_argument('--n', default=None, type=int, help='override the number of spins')

run.add_argument('--axis', default=None, type=str.lower, choices=['x', 'y', 'z'],
                 help='relabel the state axis; observables follow the same relabelling')

run.add_argument('--routes', default=None, type=lambda s: [r.strip() for r in s.split(',') if r.strip()],
                 help=f'comma separated subset of {",".join(ROUTES)}')

run.add_argument('--shots', default=None, type=int, help='monte-carlo shots (scenario default: 100000)')

run.add_argument('-s', '--seed', default=None, type=int, help='monte-carlo seed (scenario default: 9999)')

run.add_argument('--format', default='text', choices=FORMATS, help='report format')

run.add_argument('-o', '--out', default=None, type=str,
                 help='output file for all reports, or directory for one report per scenario '
                      '(default: $SPIN_REPORT_DIR or stdout)')

run.add_argument('--strict', action='store_true', help='also fail when a requested route had to be skipped')

run.add_argument('--dense-cap', default=DENSE_CAP, type=int,
                 help=f'largest N for 2^N dense vectors and matrices (default: {DENSE_CAP})')

commands.add_parser('list', help='list built-in scenarios')

fuzz = commands.add_parser('fuzz', help='compare ensemble and trace routes on random ensembles')

fuzz.add_argument('--cases', default=200, type=int, help='number of random (ensemble, observable) pairs')

fuzz.add_argument('--max-sites', default=5, type=int, help='largest number of spins drawn')

fuzz.add_argument('--max-members', default=8, type=int, help='largest ensemble size drawn')

fuzz.add_argument('-s', '--seed', default=9999, type=int, help='the random seed to set')


def get_arguments(argv=None):
    return parser.parse_args(argv)
