"""Operatorial classical mechanics on phase-space Hilbert space.

Subpackages
-----------
sector     Pauli-string matrix realization of the multiform (Grassmann) sector
polyfield  exact polynomial coefficient fields
graded     exterior calculus and symmetry charges as graded operators
superpoly  extended-Poisson-bracket symbolic engine and superfields
metrics    scalar products, hermiticity analysis, physical subspaces
dynamics   phase-space wave propagation and interference experiments
gauge      minimal coupling, Landau and flux-line spectra
cli        config-driven experiment runner
"""

__version__ = "0.1.0"
