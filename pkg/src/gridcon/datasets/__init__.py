"""Bundled networks: IEEE 14-bus and IEEE 118-bus smart grids."""

from .ieee14 import build_ieee14
from .ieee118 import build_ieee118

BUILDERS = {"ieee14": build_ieee14, "ieee118": build_ieee118}


def build_dataset(name):
    try:
        return BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; choose from {sorted(BUILDERS)}") from None


__all__ = ["BUILDERS", "build_dataset", "build_ieee14", "build_ieee118"]
