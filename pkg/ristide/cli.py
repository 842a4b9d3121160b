# -*- coding: utf-8 -*-
"""Command line front end::

    ristide simulate --scenario R1 --seed 7 --out runs/
    ristide analyze --run runs/<dir> --stride 20
    ristide render --run runs/<dir> --field survival --wall S4
    ristide reproduce --seeds 10 --only shadow-vs-ap

stdout carries one JSON object per command; diagnostics and errors go to
stderr, errors as ``{"error": <class>, "message": <text>}``. Exit codes are
0 on success, 1 for I/O errors, 2 for configuration or argument errors and
3 for a failed acceptance criterion.
"""
import argparse
import json
import logging
import os
import sys
from collections import OrderedDict
from datetime import datetime

from . import __version__
from .errors import CONFIG_ERRORS, IO_ERRORS, RisTideError, UsageError
from .experiments import EXPERIMENTS, AcceptanceSuite
from .sim.channel import BANDS
from .sim.config import STRIDES, load_scenario
from .sim.engine import BOUNDARIES, Simulation, summarize_run
from .sim.geometry import WALL_IDS, build_layout
from .sinks import (GainSink, MaskSink, RunDirectory, TrajectorySink,
                    read_gain_stream, run_meta, write_json, write_pgm,
                    write_series_csv)
from .stats.survival import wall_symmetry

__author__ = 'ristide'
__all__ = ['build_parser', 'cmd_simulate', 'cmd_analyze', 'cmd_render',
           'cmd_reproduce', 'main']

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_FAILED = 3
FIELDS = ('gain', 'survival')

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(data):
    sys.stdout.write(json.dumps(data) + '\n')
    sys.stdout.flush()


def _fail(error_name, message, code):
    logger.error('%s: %s', error_name, message)
    sys.stderr.write(json.dumps({'error': error_name,
                                 'message': message}) + '\n')
    return code


def _report_json(summary, stride):
    data = summary._json
    data['stride'] = stride
    data['wall_symmetry'] = wall_symmetry(summary)
    return data


def _write_stats_csv(out, summary):
    ksd, jsd, pacf_rows = [], [], []
    for wid, report in summary.reports.items():
        for w, (fit, value) in enumerate(zip(report.fits,
                                             report.ksd_series)):
            ksd.append([wid, w, value, None if fit is None else fit.m,
                        None if fit is None else fit.omega])
        for w, value in enumerate(report.jsd_series):
            jsd.append([wid, w, w + 1, value])
        if report.pacf is not None:
            for lag, value in enumerate(report.pacf):
                pacf_rows.append([wid, report.pacf_tile, lag, float(value)])
    return [
        write_series_csv(os.path.join(out, 'ksd.csv'),
                         ('wall_id', 'window', 'ksd', 'm', 'omega'), ksd),
        write_series_csv(os.path.join(out, 'jsd.csv'),
                         ('wall_id', 'window', 'next_window', 'jsd'), jsd),
        write_series_csv(os.path.join(out, 'pacf.csv'),
                         ('wall_id', 'tile', 'lag', 'pacf'), pacf_rows)]


def cmd_simulate(args):
    """Run a scenario into a fresh run directory"""
    config = load_scenario(args.scenario)
    if args.seed is not None:
        config.seed = args.seed
    if args.band:
        config.band = args.band
    if args.stride:
        config.stats.stride = args.stride
    simulation = Simulation(config)
    run_dir = RunDirectory.create(args.out, config.seed)
    with run_dir.lock():
        started = datetime.now().isoformat()
        sinks = []
        if 'trajectory' in config.outputs:
            sinks.append(TrajectorySink(run_dir.join('trajectory.csv')))
        if 'gains' in config.outputs:
            sinks.append(GainSink(run_dir.join('gains.csv'),
                                  simulation.layout,
                                  config.outputs.gain_walls,
                                  config.outputs.gain_every))
        if 'masks' in config.outputs:
            sinks.append(MaskSink(run_dir.subdir('masks'), simulation.layout))

        def tee():
            for snapshot in simulation.run():
                for sink in sinks:
                    sink.consume(snapshot)
                yield snapshot
        try:
            summary = summarize_run(tee(), config.stats)
        finally:
            for sink in sinks:
                sink.close()
        write_json(run_dir.join('meta.json'),
                   run_meta(config, simulation, args.scenario, started,
                            datetime.now().isoformat()))
        if 'report' in config.outputs:
            write_json(run_dir.join('report.json'),
                       _report_json(summary, config.stats.stride))
    logger.info('run written to %s', run_dir.path)
    _emit(OrderedDict([('command', 'simulate'), ('run_dir', run_dir.path),
                       ('seed', config.seed), ('band', config.band.id),
                       ('steps', config.duration_steps),
                       ('spawned', summary.spawned),
                       ('despawned', summary.despawned),
                       ('mean_survival', summary.mean_survival()),
                       ('audit_mismatches', simulation.mismatches)]))
    return EXIT_OK


def cmd_analyze(args):
    """Recompute the drift report of a run from its gains.csv"""
    run_dir = RunDirectory.open(args.run)
    out = RunDirectory.ensure(args.out) if args.out else run_dir
    config, snapshots = read_gain_stream(run_dir)
    if args.stride:
        config.stats.stride = args.stride
    if config.outputs.gain_every > 1:
        logger.warning('gains.csv keeps every %d-th emitted step; windows '
                       'span more time than in the run',
                       config.outputs.gain_every)
    with out.lock():
        summary = summarize_run(snapshots, config.stats)
        if not summary.reports:
            raise UsageError(
                'stride {} leaves fewer than two windows on every wall of '
                '{}'.format(config.stats.stride, run_dir.path))
        report = write_json(out.join('report.json'),
                            _report_json(summary, config.stats.stride))
        files = _write_stats_csv(out.path, summary)
    walls = OrderedDict(
        (wid, {'max_ksd': r.max_ksd, 'mean_jsd': r.mean_jsd,
               'windows': r.n_windows})
        for wid, r in summary.reports.items())
    _emit(OrderedDict([('command', 'analyze'), ('report', report),
                       ('files', files), ('stride', config.stats.stride),
                       ('walls', walls)]))
    return EXIT_OK


def cmd_render(args):
    """Write one heatmap per wall and phase boundary"""
    run_dir = RunDirectory.open(args.run)
    config, snapshots = read_gain_stream(run_dir)
    layout = build_layout(config.layout)
    with run_dir.lock():
        summary = summarize_run(snapshots, config.stats)
        directory = run_dir.subdir('render')
        source = summary.boundary_fields if args.field == 'gain' else \
            summary.boundary_survival
        walls = [args.wall] if args.wall else list(summary.walls)
        written = []
        for label in BOUNDARIES:
            for wid in walls:
                value = source.get(label, {}).get(wid)
                if value is None:
                    logger.warning('no %s snapshot for %s at %s', args.field,
                                   wid, label)
                    continue
                values = getattr(value, 'rates', value)
                path = os.path.join(directory, '{}_{}_{}.pgm'.format(
                    wid, args.field, label))
                written.append(write_pgm(path,
                                         layout.grid(wid).image(values)))
    _emit(OrderedDict([('command', 'render'), ('field', args.field),
                       ('files', written)]))
    return EXIT_OK


def cmd_reproduce(args):
    """Run the acceptance suite and print its table"""
    suite = AcceptanceSuite(args.seeds, args.steps, args.workers)
    results = suite.run(args.only)
    failed = [r['name'] for r in results if not r['passed']]
    table = OrderedDict([('command', 'reproduce'), ('seeds', args.seeds),
                         ('steps', args.steps), ('results', results),
                         ('passed', not failed)])
    if args.out:
        out = RunDirectory.ensure(args.out)
        with out.lock():
            write_json(out.join('acceptance.json'), table)
    _emit(table)
    if failed:
        return _fail('AcceptanceFailure',
                     'failed criteria: {}'.format(', '.join(failed)),
                     EXIT_FAILED)
    return EXIT_OK


def build_parser():
    """Build the ``ristide`` argument parser"""
    common = _Parser(add_help=False)
    common.add_argument('--quiet', action='store_true',
                        help='only log warnings and errors')
    parser = _Parser(prog='ristide', description='RIS crowd drift toolkit')
    parser.add_argument('--version', action='version',
                        version='ristide {}'.format(__version__))
    commands = parser.add_subparsers(dest='command', parser_class=_Parser)
    commands.required = True

    simulate = commands.add_parser('simulate', parents=[common],
                                   help='run a scenario')
    simulate.add_argument('--scenario', required=True,
                          help='preset name (R1, R2, R3) or JSON path')
    simulate.add_argument('--seed', type=int)
    simulate.add_argument('--band', choices=sorted(BANDS))
    simulate.add_argument('--stride', type=int, choices=STRIDES)
    simulate.add_argument('--out', default='runs')
    simulate.set_defaults(func=cmd_simulate)

    analyze = commands.add_parser('analyze', parents=[common],
                                  help='recompute drift statistics')
    analyze.add_argument('--run', required=True, help='run directory')
    analyze.add_argument('--stride', type=int, choices=STRIDES)
    analyze.add_argument('--out', help='defaults to the run directory')
    analyze.set_defaults(func=cmd_analyze)

    render = commands.add_parser('render', parents=[common],
                                 help='write phase boundary heatmaps')
    render.add_argument('--run', required=True, help='run directory')
    render.add_argument('--field', choices=FIELDS, default='gain')
    render.add_argument('--wall', choices=WALL_IDS)
    render.set_defaults(func=cmd_render)

    reproduce = commands.add_parser('reproduce', parents=[common],
                                    help='run the acceptance suite')
    reproduce.add_argument('--seeds', type=int, default=10)
    reproduce.add_argument('--steps', type=int, default=2000)
    reproduce.add_argument('--workers', type=int, default=1,
                           help='threads per run, capped by RIS_TIDE_THREADS')
    reproduce.add_argument('--only', choices=EXPERIMENTS)
    reproduce.add_argument('--out', help='directory for acceptance.json')
    reproduce.set_defaults(func=cmd_reproduce)
    return parser


def _configure_logging(quiet):
    logging.basicConfig(
        stream=sys.stderr, level=logging.WARNING if quiet else logging.INFO,
        format='%(asctime)s %(name)s %(levelname)s %(message)s')


def main(argv=None):
    """Entry point of the ``ristide`` command

    :return: the process exit code
    """
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.quiet)
        return args.func(args)
    except CONFIG_ERRORS as err:
        return _fail(type(err).__name__, err.message, EXIT_CONFIG)
    except IO_ERRORS as err:
        return _fail(type(err).__name__, err.message, EXIT_IO)
    except RisTideError as err:
        return _fail(type(err).__name__, err.message, EXIT_IO)


if __name__ == '__main__':
    sys.exit(main())
