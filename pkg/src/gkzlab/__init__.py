"""Exact and numerical tools for toric GKZ systems and their monodromy.

Modules, bottom-up: :mod:`lattice` (integer normal forms), :mod:`arrangement`
(zonotope, periodic arrangement, face poset), :mod:`windows` (window
characters, Laurent matrices), :mod:`gkz` (operators and Gamma-series),
:mod:`monodromy` (Fuchsian continuation, Gauss closed forms),
:mod:`perverse` (diagram data validation) and :mod:`cli`.
"""

__version__ = "0.1.0"
