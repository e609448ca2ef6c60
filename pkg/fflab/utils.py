#----------------------------------------------------------------------------
# Created By  : fflab developers
# Date: 2024
# --------------------------------------------------------------------------
import os
import sys
import json
import logging

from .errors import ConfigError

__all__ = ["json_read", "json_write", "mkdir", "config_logger", "env_threads",
           "merge_config"]

def json_read(filename):
    try:
        with open(os.path.abspath(filename)) as f:
            data = json.load(f)
        return data
    except (OSError, json.JSONDecodeError):
        raise ConfigError("Unable to read JSON {}".format(filename))

def json_write(filename, data):
    try:
        mkdir(os.path.dirname(os.path.abspath(filename)))
        with open(os.path.abspath(filename), 'w') as f:
            json.dump(data, f, indent=2)
    except (OSError, TypeError):
        raise ConfigError("Unable to write JSON {}".format(filename))

def mkdir(directory):
    directory = os.path.abspath(directory)
    if not os.path.exists(directory):
        os.makedirs(directory)

def env_threads(name="FFLAB_THREADS"):
    """Worker cap from the environment, 1 when unset."""
    value = os.environ.get(name)
    if value is None or value.strip() == "":
        return 1
    try:
        n = int(value)
    except ValueError:
        raise ConfigError("{} must be an integer, got {!r}".format(name, value))
    if n < 1:
        raise ConfigError("{} must be at least 1, got {}".format(name, n))
    return n

def merge_config(defaults, overrides):
    """
    Merge a user configuration over the defaults.

    Parameters
    ----------
    defaults : dict
    overrides : dict or None
        keys must already exist in `defaults`

    Return
    ------
    config : dict
        a new dictionary
    """
    config = dict(defaults)
    if not overrides:
        return config
    if not isinstance(overrides, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = sorted(set(overrides) - set(defaults))
    if unknown:
        raise ConfigError("unknown configuration keys: {}".format(", ".join(unknown)))
    config.update(overrides)
    return config

def config_logger(log_file=None, level=logging.INFO):
    """
    Route fflab logs to stderr, and to `log_file` when given.

    Suite starts and pass counts are logged at INFO. A precondition that
    forces a trivial result (an empty Deuring census, for example) is a
    WARNING, and every failed report line is an ERROR. stdout is left to the
    CSV or JSON-lines report. `verify_cli.main` calls this once per run and
    library modules only log. Handlers from an earlier call are replaced.
    """

    class LevelFormatter(logging.Formatter):

        colours = {logging.WARNING: "33", logging.ERROR: "31", logging.CRITICAL: "31"}

        def __init__(self, colour):
            super(LevelFormatter, self).__init__()
            self.colour = colour

        def format(self, record):
            head = "%(asctime)s [%(name)s]"
            if record.levelno > logging.INFO:
                head += " [%(levelname)s]"
            if self.colour:
                code = self.colours.get(record.levelno, "32")
                head = "\x1b[" + code + ";1m" + head + "\x1b[0m"
            self._style._fmt = head + " %(message)s"
            return super(LevelFormatter, self).format(record)

    rootLogger = logging.getLogger()
    for handler in [h for h in rootLogger.handlers if getattr(h, "_fflab", False)]:
        rootLogger.removeHandler(handler)
        handler.close()

    handlers = []
    if log_file is not None:
        fileHandler = logging.FileHandler(log_file)
        fileHandler.setFormatter(logging.Formatter(
            "%(asctime)s [%(name)s] [%(levelname)s]> %(message)s"))
        handlers.append(fileHandler)

    consoleHandler = logging.StreamHandler(sys.stderr)
    consoleHandler.setFormatter(LevelFormatter(sys.stderr.isatty()))
    handlers.append(consoleHandler)

    for handler in handlers:
        handler._fflab = True
        rootLogger.addHandler(handler)
    rootLogger.setLevel(level)
