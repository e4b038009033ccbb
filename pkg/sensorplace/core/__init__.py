from .stacked import (
    StackedMaps,
    InformationAtoms,
    build_stacked_maps,
    build_information_atoms,
    atoms_for,
)
from .estimation import LogdetObjective, mmse_report
from .placement import greedy_p1, greedy_p2
from .oracle import OracleTable, enumerate_all

__all__ = [
    "StackedMaps",
    "InformationAtoms",
    "build_stacked_maps",
    "build_information_atoms",
    "atoms_for",
    "LogdetObjective",
    "mmse_report",
    "greedy_p1",
    "greedy_p2",
    "OracleTable",
    "enumerate_all",
]
