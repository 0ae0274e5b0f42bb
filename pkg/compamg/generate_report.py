# -*- coding: utf-8 -*-
"""
Created on Tue Sep 22 16:03:40 2026

@author: compamg developers
"""

import json
import time
import pandas as pd

from compamg.utilities import CreateOutputDir
from compamg.version import __version__


# keys every report must hold, per report kind
REPORT_SCHEMA = {'build': {'version': str, 'created': str, 'kind': str, 'matrix': dict, 'build_log': dict},
                 'solve': {'version': str, 'created': str, 'kind': str, 'matrix': dict, 'build_log': dict,
                           'solves': list, 'metrics': list},
                 'check': {'version': str, 'created': str, 'kind': str, 'matrix': dict, 'checks': dict, 'passed': bool}}

# keys of a single solve record
SOLVE_SCHEMA = {'mode': str, 'components': int, 'residual_history': list, 'rho_per_cycle': list,
                'iterations': int, 'converged': bool, 'wall_times': dict}

HISTORY_COLUMNS = ['k', 'mode', 'iter', 'relres']


def MakeReport(kind, matrix_info, **content):
    '''
    (str, dict, **) -> dict

    :param kind: 'build', 'solve' or 'check'
    :param matrix_info: Description of the system matrix (source, dim, nnz)
    :param content: Report sections

    Return the report with its version and time stamp
    '''

    report = {'version': __version__, 'created': time.strftime('%Y-%m-%d %H:%M:%S', time.localtime()),
              'kind': kind, 'matrix': matrix_info}
    report.update(content)
    return report


def check_report_schema(report):
    '''
    (dict) -> None

    :param report: Report returned by MakeReport

    Raise a ValueError if a documented key is missing or has the wrong type
    '''

    kind = report.get('kind')
    if kind not in REPORT_SCHEMA:
        raise ValueError('ERR: Unknown report kind {0}'.format(kind))
    for key, expected in REPORT_SCHEMA[kind].items():
        if key not in report:
            raise ValueError('ERR: Missing key {0} in {1} report'.format(key, kind))
        if not isinstance(report[key], expected):
            raise ValueError('ERR: Key {0} should be of type {1}'.format(key, expected.__name__))
    for record in report.get('solves', []):
        for key, expected in SOLVE_SCHEMA.items():
            if key not in record or not isinstance(record[key], expected):
                raise ValueError('ERR: Invalid or missing key {0} in solve record'.format(key))
        if record['residual_history'][0] != 1:
            raise ValueError('ERR: Residual history must start with 1')


def WriteJsonReport(report, outputfile):
    '''
    (dict, str) -> None

    :param report: Report returned by MakeReport
    :param outputfile: Path to the json file

    Validate the report and write it as json
    '''

    check_report_schema(report)
    CreateOutputDir(outputfile)
    with open(outputfile, 'w') as newfile:
        json.dump(report, newfile, sort_keys=True, indent=4)


def HistoryTable(reports):
    '''
    (list) -> pandas.DataFrame

    :param reports: ConvergenceReport objects

    Return a table with one row per residual of every report, columns k, mode, iter, relres
    '''

    rows = []
    for report in reports:
        for iteration, relres in enumerate(report.residual_history):
            rows.append([report.components, report.mode, iteration, relres])
    return pd.DataFrame(rows, columns=HISTORY_COLUMNS)


def WriteHistoryCsv(reports, outputfile):
    '''
    (list, str) -> None

    :param reports: ConvergenceReport objects
    :param outputfile: Path to the csv file

    Write the residual histories of all reports as a csv table
    '''

    CreateOutputDir(outputfile)
    HistoryTable(reports).to_csv(outputfile, index=False, float_format='%.16e')
