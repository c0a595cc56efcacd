import json
import logging
import sys

from options.run_options import get_arguments
from scenarios.definition import apply_overrides, builtin_names, load_scenario
from scenarios.fuzz import fuzz_summary, trace_ensemble_fuzz
from scenarios.report import EXTENSIONS, emit_report, emit_reports
from scenarios.runner import run_scenario
from utils import SpinModelError, print_args, report_target, store_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _targets(names):
    if 'all' in names:
        return builtin_names()
    return names


def _write(document, target):
    if target is None:
        sys.stdout.write(document)
    else:
        store_report(document, target)


def run_command(args):
    targets = _targets(args.targets)
    specs = []
    for target in targets:
        spec = load_scenario(target)
        spec = apply_overrides(spec, n=args.n, axis=args.axis, routes=args.routes, shots=args.shots,
                               seed=args.seed)
        if args.verbose:
            print_args(spec, args)
        specs.append(spec)

    reports = [run_scenario(spec, cap=args.dense_cap) for spec in specs]

    extension = EXTENSIONS[args.format]
    target = report_target(args, reports[0].name, extension)
    if target is None or target == args.out:
        single = len(reports) == 1
        _write(emit_report(reports[0], args.format) if single else emit_reports(reports, args.format), target)
    else:
        for report in reports:
            _write(emit_report(report, args.format), report_target(args, report.name, extension))

    failures = [f for r in reports for f in r.failures(strict=args.strict)]
    logger.info('%d scenario(s) run, %d failure(s)', len(reports), len(failures))
    if failures:
        sys.stderr.write(json.dumps({'failures': failures}, indent=2) + '\n')
        return EXIT_FAILED

    return EXIT_OK


def list_command(args):
    for name in builtin_names():
        spec = load_scenario(name)
        print(f'{name}\t{spec.description}')

    return EXIT_OK


def fuzz_command(args):
    frame = trace_ensemble_fuzz(cases=args.cases, max_sites=args.max_sites, max_members=args.max_members,
                                seed=args.seed)
    summary = fuzz_summary(frame)
    print(json.dumps(summary, indent=2))

    return EXIT_OK if summary['passed'] else EXIT_FAILED


commands = {
    'run': run_command,
    'list': list_command,
    'fuzz': fuzz_command,
}


def main(argv=None):
    try:
        args = get_arguments(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=args.log_level, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        return commands[args.command](args)
    except SpinModelError as e:
        sys.stderr.write(f'error: {e}\n')
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
