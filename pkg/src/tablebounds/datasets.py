"""Bundled fixtures. ``lead.json`` is the golden dataset: children of
battery-factory employees cross-classified by the father's hygiene and lead
exposure (row sums 25/5/4, column sums 8/7/19, total 34)."""

from importlib import resources

from .io import load_table
from .table import ContingencyTable


def lead_path() -> str:
    return str(resources.files("tablebounds").joinpath("data/lead.json"))


def lead_table() -> ContingencyTable:
    return load_table(lead_path())
