"""Shared fixtures for the test suite."""

import time
from contextlib import contextmanager

import pytest

from liqscreen.economy import benchmark


@pytest.fixture
def bench_mu0():
    """Benchmark economy with an uninformative intercept of zero."""
    return benchmark(v=2.0, mu0=0.0, K=1.0, R=1.0)


@pytest.fixture
def bench_informative():
    """Benchmark economy with a positive signal intercept."""
    return benchmark(v=2.0, mu0=0.1, K=1.0, R=1.0)


@contextmanager
def runtime_budget(seconds):
    """Fail the enclosing test when the block exceeds its time budget."""
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"runtime {elapsed:.2f}s exceeds {seconds:.0f}s budget"
