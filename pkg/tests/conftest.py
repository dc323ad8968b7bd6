"""Shared fixtures: repo paths, the external-network guard, suite timing."""

from __future__ import annotations

import socket
import time
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"

_SUITE_STARTED = time.monotonic()
_SUITE_BUDGET_SECONDS = 60.0

_real_connect = socket.socket.connect


def _loopback_only_connect(self, address, *args, **kwargs):
    host = address[0] if isinstance(address, tuple) else address
    if isinstance(host, str) and not (
        host.startswith("/") or host in ("127.0.0.1", "localhost", "::1")
    ):
        raise RuntimeError(f"test suite attempted external network access: {host!r}")
    return _real_connect(self, address, *args, **kwargs)


def pytest_configure(config):
    # The whole suite must run without touching the network; loopback and
    # unix sockets stay available for the local stub server tests.
    socket.socket.connect = _loopback_only_connect


def pytest_unconfigure(config):
    socket.socket.connect = _real_connect


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.monotonic() - _SUITE_STARTED
    ok = elapsed < _SUITE_BUDGET_SECONDS
    verdict = "PASS" if ok else "FAIL"
    print(f"\n[{verdict}] acceptance: full suite ran with no external network access "
          f"and finished in {elapsed:.1f}s (budget {_SUITE_BUDGET_SECONDS:.0f}s)")
    if not ok and exitstatus == 0:
        session.exitstatus = 1


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return FIXTURES / "scenario"


@pytest.fixture(scope="session")
def llm_fixture_dir() -> Path:
    return FIXTURES / "llm"


@pytest.fixture(scope="session")
def table3_dir() -> Path:
    return FIXTURES / "table3"


@pytest.fixture(scope="session")
def diagrams_dir() -> Path:
    return FIXTURES / "diagrams"
