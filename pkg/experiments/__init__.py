"""Experiment suite: each module registers one ``orbitlab`` subcommand."""

from experiments.exp_01_cfe import cfe
from experiments.exp_02_orbit_measure import orbit_measure
from experiments.exp_03_coprime import coprime
from experiments.exp_04_horocycle import horocycle
from experiments.exp_05_shear import shear
from experiments.exp_06_window import window
from experiments.exp_07_identities import identities
from experiments.exp_08_padic import padic
from experiments.exp_09_mirror import mirror
from experiments.exp_10_kuzmin import kuzmin
from experiments.exp_11_heights import heights
from experiments.exp_12_geodesic import geodesic

__all__ = [
    "cfe",
    "orbit_measure",
    "coprime",
    "horocycle",
    "shear",
    "window",
    "identities",
    "padic",
    "mirror",
    "kuzmin",
    "heights",
    "geodesic",
]
