"""Kernels of split epimorphisms from products of groups onto Z^m.

The package models a direct product G = G_1 x ... x G_{2n} of groups,
an epimorphism Phi onto a blocked free abelian group Z^m = A_1 + ... + A_n
that restricts to a split surjection on each factor, and the subgroup
lattice, triangle templates, and area (isoperimetric) bookkeeping of the
kernel of Phi.

Modules
-------
abelian
    Blocked free abelian groups and their vectors.
factor
    Free factor groups, sections, kernel generating sets, distances.
product
    The ambient direct product, padding calculus, l1 distances.
lattice
    The 46 distinguished subgroups, their generator patterns and reports.
triangle
    The 36-vertex algebraic triangle template and its actualizations.
filler
    Loop subdivision, area bounds, and growth-function utilities.
cli
    Command line interface.
"""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
