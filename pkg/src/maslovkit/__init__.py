"""Maslov-index toolkit: Lagrangian and symplectic paths, absolute indices on
the universal cover, a graded Dehn-twist calculus and monodromy obstructions."""

from .symcore import HalfInt, ZModN
from .paths import LagrangianPath, SymplecticPath
from .index import conley_zehnder, crossings, maslov_pair

__all__ = ["HalfInt", "ZModN", "LagrangianPath", "SymplecticPath",
           "conley_zehnder", "crossings", "maslov_pair"]
