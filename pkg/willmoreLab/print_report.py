#! /usr/bin/env python3
# coding=utf-8
"""
output of reports as text tables
"""
"""
Author: willmoreLab developers
"""

import numpy as np


def _fmt(value):
    if value is None:
        return '-'
    if isinstance(value, (bool, np.bool_)):
        return 'yes' if value else 'no'
    if isinstance(value, (int, np.integer)):
        return '{:d}'.format(value)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            return str(value)
        return '{:.3e}'.format(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return _fmt(value[-1]) if len(value) else '-'
    return str(value)


def _headline(entry):
    """the value that best summarizes an entry: order, error, max norm or
    plain value"""
    for key in ('order', 'error', 'max', 'value', 'errors'):
        if key in entry.values:
            return key, entry.values[key]
    return '', None


def report2text(report, show_anchor=False):
    """returns a string with the tabular representation of the report

    Args:
        report: :class:`~willmoreLab.report.Report`
        show_anchor (optional): add the anchor of each check below its line

    Returns:
        string with line breaks
    """
    width = max([len(e.name) for e in report.entries] + [5])
    lines = ['{} ({} checks, {})'.format(report.command, len(report.entries),
                                          'passed' if report.passed else 'FAILED')]
    lines.append('{:<{w}s}  {:>6s}  {:>8s} {:>10s}  {:>10s}'.format('check', 'status', 'quantity', 'value',
                                                                   'tolerance', w=width))
    for e in report.entries:
        status = 'info' if e.informational else ('ok' if e.passed else 'FAIL')
        key, value = _headline(e)
        lines.append('{:<{w}s}  {:>6s}  {:>8s} {:>10s}  {:>10s}'.format(
            e.name, status, key, _fmt(value), _fmt(e.tolerance), w=width))
        if show_anchor:
            lines.append('{}  {}'.format(' '*width, e.anchor))
    return '\n'.join(lines)
