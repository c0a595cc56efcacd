"""
Report documents: an aligned text table, CSV, or structured JSON.

Text and CSV print numbers with 15 significant digits; JSON keeps full precision and
reads back into an equal ScenarioReport. Nothing time-dependent is written, so equal
inputs give byte-identical documents.
"""
import dataclasses
import json

import pandas as pd

from scenarios.runner import RouteResult, ScenarioReport

FORMATS = ('text', 'csv', 'structured')
EXTENSIONS = {'text': 'txt', 'csv': 'csv', 'structured': 'json'}
CSV_COLUMNS = ['scenario', 'observable', 'route', 'mean', 'variance', 'stderr', 'pass']
FLOAT_FORMAT = '%.15g'


def _flag(value):
    return '' if value is None else ('true' if value else 'false')


def _leaves(report):
    """
    Reports that carry rows: the report itself, or each compared system in order.
    """
    if report.parts:
        return list(report.parts)
    return [report]


def report_frame(report):
    records = []
    for leaf in _leaves(report):
        for row in leaf.rows:
            records.append({'scenario': leaf.name,
                            'observable': row.observable,
                            'route': row.route,
                            'mean': row.mean,
                            'variance': row.variance,
                            'stderr': row.stderr,
                            'pass': _flag(row.passed)})

    return pd.DataFrame.from_records(records, columns=CSV_COLUMNS).astype(
        {'mean': float, 'variance': float, 'stderr': float})


def _text_table(leaf):
    df = pd.DataFrame.from_records([{
        'observable': row.observable,
        'route': row.route,
        'mean': row.mean,
        'variance': row.variance,
        'stderr': row.stderr,
        'expected mean': row.expected_mean,
        'expected variance': row.expected_variance,
        'provenance': row.provenance or '',
        'pass': _flag(row.passed),
        'note': row.skip_reason or '; '.join(row.failures),
    } for row in leaf.rows])
    numeric = ['mean', 'variance', 'stderr', 'expected mean', 'expected variance']
    df[numeric] = df[numeric].astype(float)

    return df.to_string(index=False, float_format=lambda v: FLOAT_FORMAT % v, na_rep='-')


def _text_block(leaf, indent=''):
    lines = [f'{indent}scenario: {leaf.name}']
    if leaf.description:
        lines.append(f'{indent}description: {leaf.description}')
    lines.append(f'{indent}state: {leaf.state_kind}, {leaf.n_sites} site(s)')
    if leaf.system:
        lines.append(f'{indent}system: {leaf.system}')
    for note in leaf.notes:
        lines.append(f'{indent}note: {note}')
    lines.extend(indent + line for line in _text_table(leaf).splitlines())

    return lines


def _provenance_line(report):
    p = report.provenance
    return f'provenance: seed {p.get("seed")}, rng {p.get("rng")}, shots {p.get("shots")}, version {p.get("version")}'


def _emit_text(report):
    if not report.parts:
        lines = _text_block(report)
    else:
        lines = [f'scenario: {report.name}']
        if report.description:
            lines.append(f'description: {report.description}')
        lines.append(report.annotation)
        for note in report.notes:
            lines.append(f'note: {note}')
        for part in report.parts:
            lines.append('')
            lines.extend(_text_block(part, indent='  '))
    lines.append(_provenance_line(report))

    return '\n'.join(lines) + '\n'


def report_to_dict(report):
    return dataclasses.asdict(report)


def emit_report(report, fmt='text'):
    if fmt == 'text':
        return _emit_text(report)
    if fmt == 'csv':
        return report_frame(report).to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    if fmt == 'structured':
        return json.dumps(report_to_dict(report), indent=2) + '\n'
    raise ValueError(f'unknown report format {fmt!r}; expected one of {", ".join(FORMATS)}')


def emit_reports(reports, fmt='text'):
    """
    One document for several reports: texts separated by a blank line, one CSV table,
    or a JSON list.
    """
    if fmt == 'csv':
        frame = pd.concat([report_frame(r) for r in reports], ignore_index=True)
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    if fmt == 'structured':
        return json.dumps([report_to_dict(r) for r in reports], indent=2) + '\n'

    return '\n'.join(emit_report(r, fmt) for r in reports)


def _report_from_dict(data):
    rows = tuple(RouteResult(**dict(row, failures=tuple(row['failures']))) for row in data['rows'])
    parts = tuple(_report_from_dict(part) for part in data['parts'])

    return ScenarioReport(**dict(data, notes=tuple(data['notes']), rows=rows, parts=parts))


def report_from_structured(text):
    data = json.loads(text)
    if isinstance(data, list):
        return [_report_from_dict(d) for d in data]
    return _report_from_dict(data)
