"""Bundled example diagrams (see the comment block at the top of each file)."""
from importlib import resources

from ..diagram import parse

NAMES = ("U1", "T2", "A1", "H1", "H2", "TREF", "F8")


def fixture_text(name):
    return resources.files(__name__).joinpath(f"{name}.hd").read_text(encoding="utf-8")


def load_fixture(name):
    return parse(fixture_text(name))


def fixture_path(name):
    return resources.files(__name__).joinpath(f"{name}.hd")
