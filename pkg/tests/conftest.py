import glob
import os
import sys

import pytest

import cdict

_PKG = os.path.dirname(cdict.__file__)


def pytest_sessionstart(session):
    # a compiled module older than its source would shadow the edits
    for so in glob.glob(os.path.join(_PKG, "*.so")):
        src = os.path.join(_PKG, os.path.basename(so).split(".")[0] + ".py")
        if os.path.exists(src) and os.path.getmtime(so) < os.path.getmtime(src):
            pytest.exit(f"{so} is older than {src}; rebuild with `pip install -e . --no-build-isolation`", 2)


def pytest_report_header(config):
    compiled = sorted(os.path.basename(p).split(".")[0] for p in glob.glob(os.path.join(_PKG, "*.so")))
    return f"cdict compiled modules: {', '.join(compiled) or 'none (pure Python)'}"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
