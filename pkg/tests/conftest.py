"""Shared pytest fixtures (temp dirs, numeric config, canonical channels)."""

import os
import tempfile
import shutil

import pytest

from rician_lowsnr.channel import ChannelSpec
from rician_lowsnr.specfun import NumericConfig


@pytest.fixture
def temp_dir():
    """Create a temporary directory; yield path; cleanup after test."""
    d = tempfile.mkdtemp(prefix="rician_lowsnr_test_")
    try:
        yield d
    finally:
        if os.path.exists(d):
            shutil.rmtree(d, ignore_errors=True)


@pytest.fixture
def cfg():
    return NumericConfig()


@pytest.fixture
def rayleigh():
    """K=0, L=1, Ω=1: exponential gain, every quantity has a closed form."""
    return ChannelSpec(0.0, 1, 1.0)


@pytest.fixture
def fig1_spec():
    return ChannelSpec(1.0, 3, 1.0)


@pytest.fixture
def fig2_spec():
    return ChannelSpec(2.0, 2, 1.0)
