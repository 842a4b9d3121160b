# -*- coding: utf-8 -*-
import json
import os

import mock
import pytest

from ristide.cli import build_parser, main
from ristide.sinks import GAINS_HEADER, read_json, write_series_csv


def _last_json(text):
    return json.loads(text.strip().splitlines()[-1])


@pytest.fixture
def run_dir(tmpdir, scenario_file, no_git, capsys):
    """A finished short run"""
    code = main(['simulate', '--scenario', scenario_file, '--seed', '3',
                 '--out', str(tmpdir.join('runs')), '--quiet'])
    assert code == 0
    return _last_json(capsys.readouterr().out)['run_dir']


def test_simulate(run_dir):
    for name in ('meta.json', 'trajectory.csv', 'gains.csv', 'report.json'):
        assert os.path.isfile(os.path.join(run_dir, name))
    assert not os.path.exists(os.path.join(run_dir, '.lock'))
    assert os.path.basename(run_dir).endswith('-seed3')
    meta = read_json(os.path.join(run_dir, 'meta.json'))
    assert meta['seed'] == 3
    assert meta['git'] == 'v0-test'
    assert meta['scenario']['seed'] == 3
    assert meta['audit']['mismatches'] == 0
    report = read_json(os.path.join(run_dir, 'report.json'))
    assert report['stride'] == 5
    assert report['boundary_steps'] == {'enter': 9, 'wander': 42, 'exit': 60}
    assert 'all' in report['wall_symmetry']


def test_simulate_prints_a_summary(tmpdir, scenario_file, no_git, capsys):
    main(['simulate', '--scenario', scenario_file, '--band', 'vl',
          '--out', str(tmpdir), '--quiet'])
    out = _last_json(capsys.readouterr().out)
    assert out['command'] == 'simulate'
    assert out['band'] == 'vl'
    assert out['steps'] == 60
    assert out['spawned'] == 2
    assert out['audit_mismatches'] == 0


def test_seeded_runs_write_identical_gains(tmpdir, scenario_file, no_git,
                                           capsys):
    contents = []
    for name in ('first', 'second'):
        assert main(['simulate', '--scenario', scenario_file, '--seed', '11',
                     '--out', str(tmpdir.join(name)), '--quiet']) == 0
        run_dir = _last_json(capsys.readouterr().out)['run_dir']
        with open(os.path.join(run_dir, 'gains.csv'), 'rb') as handle:
            contents.append(handle.read())
    assert contents[0] == contents[1]
    assert len(contents[0].splitlines()) > 1


def test_analyze(run_dir, capsys):
    assert main(['analyze', '--run', run_dir, '--quiet']) == 0
    out = _last_json(capsys.readouterr().out)
    assert out['stride'] == 5
    assert list(out['walls']) == ['S1']
    assert out['walls']['S1']['windows'] == 6
    for name in ('ksd.csv', 'jsd.csv', 'pacf.csv'):
        assert os.path.isfile(os.path.join(run_dir, name))
    with open(os.path.join(run_dir, 'jsd.csv')) as handle:
        assert len(handle.read().splitlines()) == 6


def test_gains_hold_every_emitted_step(run_dir):
    with open(os.path.join(run_dir, 'gains.csv')) as handle:
        rows = handle.read().splitlines()[1:]
    # steps 2, 4, ..., 60 and the entering boundary at step 9
    assert len({row.split(',')[0] for row in rows}) == 31


def test_analyze_rebuilds_the_simulated_report(run_dir, capsys):
    simulated = read_json(os.path.join(run_dir, 'report.json'))
    assert main(['analyze', '--run', run_dir, '--quiet']) == 0
    analyzed = read_json(os.path.join(run_dir, 'report.json'))
    first = simulated['walls']['S1']['report']
    second = analyzed['walls']['S1']['report']
    assert len(first['fits']) == len(second['fits']) == 6
    assert second['jsd_series'] == first['jsd_series']
    assert second['ksd_series'] == first['ksd_series']
    assert analyzed['walls']['S1']['mean_gain']['values'] == \
        pytest.approx(simulated['walls']['S1']['mean_gain']['values'])


def test_analyze_with_too_long_a_stride(run_dir, capsys):
    assert main(['analyze', '--run', run_dir, '--stride', '100',
                 '--quiet']) == 2
    assert _last_json(capsys.readouterr().err)['error'] == 'UsageError'
    report = read_json(os.path.join(run_dir, 'report.json'))
    assert report['stride'] == 5
    assert 'S1' in report['walls']


def test_analyze_into_another_directory(run_dir, tmpdir, capsys):
    out_dir = str(tmpdir.join('analysis'))
    assert main(['analyze', '--run', run_dir, '--stride', '10', '--out',
                 out_dir, '--quiet']) == 0
    assert _last_json(capsys.readouterr().out)['walls']['S1']['windows'] == 3
    assert os.path.isfile(os.path.join(out_dir, 'report.json'))


def test_render(run_dir, capsys):
    assert main(['render', '--run', run_dir, '--field', 'survival',
                 '--wall', 'S1', '--quiet']) == 0
    files = _last_json(capsys.readouterr().out)['files']
    assert os.path.join(run_dir, 'render', 'S1_survival_wander.pgm') in files
    for path in files:
        with open(path, 'rb') as handle:
            assert handle.read().startswith(b'P5\n50 30\n255\n')


def test_missing_scenario(tmpdir, capsys):
    code = main(['simulate', '--scenario', str(tmpdir.join('nope.json')),
                 '--out', str(tmpdir), '--quiet'])
    assert code == 2
    error = _last_json(capsys.readouterr().err)
    assert error['error'] == 'ConfigError'


def test_bad_arguments(capsys):
    assert main(['render', '--run', 'x', '--field', 'phase']) == 2
    assert _last_json(capsys.readouterr().err)['error'] == 'UsageError'
    assert main([]) == 2


def test_gains_without_rows(run_dir, capsys):
    write_series_csv(os.path.join(run_dir, 'gains.csv'), GAINS_HEADER, [])
    assert main(['analyze', '--run', run_dir, '--quiet']) == 2
    assert _last_json(capsys.readouterr().err)['error'] == 'EmptyInputError'


def test_locked_run(run_dir, capsys):
    open(os.path.join(run_dir, '.lock'), 'w').close()
    assert main(['analyze', '--run', run_dir, '--quiet']) == 1
    assert _last_json(capsys.readouterr().err)['error'] == \
        'RunDirectoryError'


@pytest.mark.parametrize('passed,code', [(True, 0), (False, 3)])
def test_reproduce(tmpdir, capsys, passed, code):
    results = [{'name': 'concept-drift', 'passed': passed, 'value': 0.1}]
    with mock.patch('ristide.cli.AcceptanceSuite') as suite:
        suite.return_value.run.return_value = results
        assert main(['reproduce', '--seeds', '2', '--steps', '100',
                     '--only', 'concept-drift', '--out', str(tmpdir),
                     '--quiet']) == code
    suite.assert_called_once_with(2, 100, 1)
    suite.return_value.run.assert_called_once_with('concept-drift')
    table = read_json(str(tmpdir.join('acceptance.json')))
    assert table['passed'] is passed


def test_parser_defaults():
    args = build_parser().parse_args(['reproduce'])
    assert (args.seeds, args.steps, args.workers, args.only) == \
        (10, 2000, 1, None)
    args = build_parser().parse_args(['simulate', '--scenario', 'R2'])
    assert args.out == 'runs'
    assert args.seed is None
