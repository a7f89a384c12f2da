# content of conftest.py

from pathlib import Path

import pytest

test_datafiles = (
    'sample/datafiles/counts.csv',
    'sample/configs/tmsv_threshold.json',
)

test_generated_files = (
    'ch_grid.csv',
    'ch_grid.json',
    'ch_max.json',
)


def pytest_configure(config):
    """
    Allows plugins and conftest files to perform initial configuration.
    This hook is called for every plugin and initial conftest
    file after command line options have been parsed.

    The sample files are linked into the working directory so that
    doctests can refer to them by name.
    """
    for path in test_datafiles:
        link_to = Path(path)
        link_from = Path(link_to.name)
        try:
            link_from.symlink_to(link_to)
        except FileExistsError:
            pass


def pytest_collection_modifyitems(config, items):
    """
    Long reproductions run only when selected with ``-m slow``.
    """
    if "slow" in (config.getoption("-m") or ""):
        return

    skip_slow = pytest.mark.skip(reason="slow; select with -m slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def pytest_unconfigure(config):
    """
    called before test process is exited.
    """
    for path in test_datafiles:
        link_from = Path(Path(path).name)
        try:
            link_from.unlink()
        except FileNotFoundError:
            pass

    for path in test_generated_files:
        try:
            Path(path).unlink()
        except FileNotFoundError:
            pass
