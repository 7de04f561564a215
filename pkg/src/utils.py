import logging
import os
import random
import sys
from datetime import datetime
from typing import Optional

import numpy as np
import pytz
import yaml
from easydict import EasyDict

from src.errors import ConfigParseError

DEFAULT_CONFIG = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'config.yml')


def give_config(path: Optional[str] = None) -> EasyDict:
    path = path or DEFAULT_CONFIG
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = yaml.load(f, Loader=yaml.FullLoader)
    except OSError as e:
        raise ConfigParseError(f'cannot read run configuration {path}: {e.strerror}', {'path': path})
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        details = {'path': path}
        if mark is not None:
            details.update(line=mark.line + 1, column=mark.column + 1)
        raise ConfigParseError(f'run configuration {path} is not valid YAML', details)
    config = dict(raw or {})
    # fill the sections a partial file leaves out
    runner = config.setdefault('runner', {})
    runner.setdefault('log_dir', 'logs')
    runner.setdefault('log_to_file', False)
    runner.setdefault('workers', 1)
    runner.setdefault('seed', 50)
    runner.setdefault('timezone', 'UTC')
    config.setdefault('classify', {}).setdefault('warn_outside_table', True)
    verify = config.setdefault('verify', {})
    verify.setdefault('property_samples', 100)
    verify.setdefault('fail_fast', False)
    # defaults are filled on plain dicts: dict.setdefault on an EasyDict skips its attribute sync
    return EasyDict(config)


def same_seeds(seed):
    random.seed(seed)
    np.random.seed(seed)


_handler: Optional[logging.StreamHandler] = None


def setup_logging(level=logging.INFO):
    """
    One handler on the root logger, writing to whatever sys.stderr is at call time.
    Call again after swapping sys.stderr so the handler follows it.
    """
    global _handler
    root = logging.getLogger()
    if _handler is not None and _handler in root.handlers:
        _handler.setStream(sys.stderr)
    elif not root.handlers:
        _handler = logging.StreamHandler(sys.stderr)
        _handler.setFormatter(logging.Formatter('[%(levelname)s] %(name)s: %(message)s'))
        root.addHandler(_handler)
    root.setLevel(level)


def log_directory(config: EasyDict) -> str:
    stamp = datetime.now(pytz.timezone(config.runner.timezone)).strftime('%Y-%m-%d_%H-%M-%S')
    return os.path.join(config.runner.log_dir, stamp)


class _Tee(object):
    def __init__(self, console, log_file):
        self.console = console
        self.log_file = log_file

    def write(self, msg):
        self.console.write(msg)
        if self.log_file is not None:
            self.log_file.write(msg)

    def flush(self):
        self.console.flush()
        if self.log_file is not None:
            self.log_file.flush()
            os.fsync(self.log_file.fileno())


class Logger(object):
    """
    Mirror stdout and stderr into <logdir>/log.txt. The two console streams
    stay separate so JSON on stdout is never mixed with diagnostics.
    """
    def __init__(self, logdir: Optional[str]):
        self.stdout, self.stderr = sys.stdout, sys.stderr
        if logdir is not None:
            os.makedirs(logdir, exist_ok=True)
            self.log_file = open(os.path.join(logdir, 'log.txt'), 'w', encoding='utf-8')
        else:
            self.log_file = None
        sys.stdout = _Tee(self.stdout, self.log_file)
        sys.stderr = _Tee(self.stderr, self.log_file)

    def __del__(self):
        self.close()

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()

    def close(self):
        if isinstance(sys.stdout, _Tee):
            sys.stdout.flush()
            sys.stdout.log_file = None  # a handler may still hold the tee; detach before the file closes
            sys.stdout = self.stdout
        if isinstance(sys.stderr, _Tee):
            sys.stderr.flush()
            sys.stderr.log_file = None
            sys.stderr = self.stderr
        if self.log_file is not None and not self.log_file.closed:
            self.log_file.close()
        self.log_file = None
