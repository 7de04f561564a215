import logging
import os
import random
import sys

import numpy as np
import pytest

from src.errors import ConfigParseError
from src.utils import Logger, give_config, log_directory, same_seeds, setup_logging


def test_default_configuration():
    config = give_config()
    assert config.runner.workers == 4
    assert config.verify.property_samples >= 100
    assert config.classify.warn_outside_table is True


def test_partial_configuration_gets_defaults(tmp_path):
    path = tmp_path / 'run.yml'
    path.write_text('runner:\n  workers: 2\n')
    config = give_config(str(path))
    assert (config.runner.workers, config.runner.seed, config.runner.timezone) == (2, 50, 'UTC')
    assert config.verify.fail_fast is False
    empty = tmp_path / 'empty.yml'
    empty.write_text('')
    assert give_config(str(empty)).runner.log_to_file is False


def test_configuration_errors(tmp_path):
    path = tmp_path / 'run.yml'
    path.write_text('runner:\n  workers: [1,\n')
    with pytest.raises(ConfigParseError) as info:
        give_config(str(path))
    assert info.value.details['line'] >= 2
    with pytest.raises(ConfigParseError):
        give_config(str(tmp_path / 'missing.yml'))


def test_same_seeds():
    same_seeds(7)
    first = (random.random(), np.random.rand())
    same_seeds(7)
    assert (random.random(), np.random.rand()) == first


def test_logger_tees_both_streams(tmp_path):
    config = give_config()
    config.runner.log_dir = str(tmp_path)
    logdir = log_directory(config)
    assert logdir.startswith(str(tmp_path))
    stdout = sys.stdout
    with Logger(logdir):
        print('to stdout')
        print('to stderr', file=sys.stderr)
    assert sys.stdout is stdout
    with open(os.path.join(logdir, 'log.txt'), encoding='utf-8') as f:
        text = f.read()
    assert 'to stdout' in text and 'to stderr' in text


def test_logging_follows_the_tee(tmp_path, monkeypatch):
    root = logging.getLogger()
    monkeypatch.setattr(root, 'handlers', [])
    monkeypatch.setattr(root, 'level', root.level)
    monkeypatch.setattr('src.utils._handler', None)
    setup_logging()
    with Logger(str(tmp_path)):
        setup_logging()
        logging.getLogger('duval').warning('inside the tee')
    setup_logging()
    logging.getLogger('duval').warning('after the tee')
    assert len(root.handlers) == 1
    with open(os.path.join(str(tmp_path), 'log.txt'), encoding='utf-8') as f:
        text = f.read()
    assert 'inside the tee' in text and 'after the tee' not in text
