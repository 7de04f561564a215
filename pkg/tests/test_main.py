import json
import logging

import pytest

from main import EXIT_CHECKS_FAILED, main


def write_json(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def last_json_line(text):
    return json.loads([line for line in text.splitlines() if line.startswith('{')][-1])


#%% report
def test_report(tmp_path, capsys):
    path = write_json(tmp_path, 'cone.json', {'type': 'Dn', 'n': 2, 'delta2': 3})
    assert main(['--workers', '1', 'report', path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert (out['pg'], out['q'], out['ksq'], out['chi']) == (1, 0, 2, 2)
    assert out['bicanonical_degree'] == 4
    assert out['pencil']['double_fibres'] == 2


def test_report_of_the_smooth_octic(tmp_path, capsys):
    path = write_json(tmp_path, 'octic.json', {'type': 'D'})
    assert main(['report', path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert (out['pg'], out['ksq'], out['pencil'], out['ample_canonical']) == (3, 2, None, True)


def test_report_logs_warnings(tmp_path, caplog):
    path = write_json(tmp_path, 'flat.json', {'type': 'Dn', 'n': 2, 'delta2': 4})
    assert main(['report', path]) == 0
    assert 'K^2 = 0 <= 0' in caplog.text


def test_inadmissible_configuration(tmp_path, capsys):
    path = write_json(tmp_path, 'bad.json', {'type': 'Dn', 'n': 0, 'delta2': 1})
    assert main(['report', path]) == 2
    captured = capsys.readouterr()
    assert captured.out == ''
    error = last_json_line(captured.err)
    assert error['error'] == 'Inadmissible'
    assert any('delta2 <= n' in r for r in error['details']['reasons'])


def test_parse_errors(tmp_path, capsys):
    path = tmp_path / 'broken.json'
    path.write_text('{"type": ')
    assert main(['report', str(path)]) == 1
    assert last_json_line(capsys.readouterr().err)['error'] == 'ConfigParseError'
    assert main(['report', write_json(tmp_path, 'odd.json', {'type': 'Dn', 'n': 1, 'colour': 'red'})]) == 1


@pytest.mark.parametrize('argv', [[], ['fly'], ['classify', '--pg', 'one', '--q', '0'], ['classify', '--q', '0']])
def test_bad_flags(argv, capsys):
    assert main(argv) == 1
    assert last_json_line(capsys.readouterr().err)['error'] == 'ConfigParseError'


def test_bad_run_configuration(tmp_path, capsys):
    path = tmp_path / 'run.yml'
    path.write_text('runner: [unclosed\n')
    assert main(['--config', str(path), 'verify-paper']) == 1


#%% classify
def test_classify(capsys):
    assert main(['classify', '--pg', '1', '--q', '1', '--ksq', '8']) == 0
    out = json.loads(capsys.readouterr().out)
    assert [r['config']['n'] for r in out['results']] == [6]
    assert out['results'][0]['config']['conic'] == 'on_conic'
    assert out['table_check']['passed']


def test_classify_warns_outside_the_table(tmp_path, capsys, caplog):
    assert main(['--workers', '2', 'classify', '--pg', '0', '--q', '0']) == 0
    captured = capsys.readouterr()
    out = json.loads(captured.out)
    assert out['table_check']['missing'] == []
    assert out['table_check']['warnings']
    assert 'outside the table' in caplog.text

    quiet = tmp_path / 'quiet.yml'
    quiet.write_text('classify:\n  warn_outside_table: False\n')
    assert main(['--config', str(quiet), 'classify', '--pg', '0', '--q', '0']) == 0
    assert json.loads(capsys.readouterr().out)['table_check']['warnings'] == []


#%% resolve
def test_resolve_configuration(tmp_path, capsys):
    path = write_json(tmp_path, 'd3.json', {'type': 'Dn', 'n': 3, 'delta1': 2})
    assert main(['resolve', path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out['minus_two_curves']) == 8
    assert out['steps'][0] == {'center': 'gamma', 'multiplicity': 8, 'half': 4, 'subtraction': 8,
                               'exceptional_in_branch': False}
    assert out['half_class'][0] == 8


def test_resolve_raw_branch(tmp_path, capsys):
    path = write_json(tmp_path, 'raw.json', {'type': 'branch', 'ambient': 'P2', 'class': [12],
                                            'singularities': [{'kind': 'rr', 'p': 'p', 'p_prime': "p'", 'r': 5}]})
    assert main(['resolve', path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [s['subtraction'] for s in out['steps']] == [4, 6]
    assert out['smooth_branch'] == [12, -4, -6]
    assert out['minus_two_curves'] == [[0, 1, -1]]


def test_resolve_odd_branch(tmp_path, capsys):
    path = write_json(tmp_path, 'odd.json', {'type': 'branch', 'class': [9]})
    assert main(['resolve', path]) == 2
    assert last_json_line(capsys.readouterr().err)['error'] == 'OddBranchClass'


#%% verify-paper
def test_verify_paper_subset(capsys):
    assert main(['--workers', '1', 'verify-paper', '--only', 'conic-']) == 0
    out = json.loads(capsys.readouterr().out)
    assert sorted(r['id'] for r in out['records']) == ['conic-circle', 'conic-empty', 'conic-generic-five',
                                                       'conic-generic-six']
    assert out['summary'] == {'checks': 4, 'passed': 4, 'failed': []}


def test_verify_paper_exit_code_is_distinct():
    assert EXIT_CHECKS_FAILED not in (0, 1, 2)


def test_log_to_file(tmp_path, capsys):
    run = tmp_path / 'run.yml'
    run.write_text(f'runner:\n  log_to_file: True\n  log_dir: {tmp_path / "logs"}\n')
    assert main(['--config', str(run), 'verify-paper', '--only', 'conic-empty']) == 0
    logs = list((tmp_path / 'logs').glob('*/log.txt'))
    assert len(logs) == 1
    assert 'conic-empty' in logs[0].read_text()


def test_log_file_receives_warnings(tmp_path, monkeypatch):
    root = logging.getLogger()
    monkeypatch.setattr(root, 'handlers', [])
    monkeypatch.setattr(root, 'level', root.level)
    monkeypatch.setattr('src.utils._handler', None)
    run = tmp_path / 'run.yml'
    run.write_text(f'runner:\n  log_to_file: True\n  log_dir: {tmp_path / "logs"}\n')
    path = write_json(tmp_path, 'flat.json', {'type': 'Dn', 'n': 2, 'delta2': 4})
    assert main(['--config', str(run), 'report', path]) == 0
    logs = list((tmp_path / 'logs').glob('*/log.txt'))
    assert len(logs) == 1
    assert 'K^2 = 0 <= 0' in logs[0].read_text()
