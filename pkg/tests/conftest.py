from __future__ import annotations

import os
import shutil
import subprocess

import pytest

from mml.world import load_world

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(REPO, "fixtures")
FRONTEND = os.path.join(REPO, "frontend")
GOLDEN = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def read_fixture(name: str) -> str:
    with open(fixture_path(name), "r", encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture(scope="session")
def world_default():
    return load_world(fixture_path("world_default.json"))


@pytest.fixture(scope="session")
def node_path():
    node = shutil.which("node")
    if node is None:
        pytest.skip("node.js is not available")
    return node


def run_node(args: list[str], timeout: int = 60) -> subprocess.CompletedProcess:
    return subprocess.run(
        ["node", *args], capture_output=True, text=True, timeout=timeout, cwd=FRONTEND
    )
