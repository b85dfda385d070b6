"""Photonic simulation of small Heisenberg spin clusters.

Submodules: ``fock`` (linear optics and post-selection), ``spin`` (exact
diagonalisation), ``valence`` (dimer coverings), ``entanglement``
(concurrence and monogamy), ``tomography`` and ``cli``.
"""

__version__ = "0.1.0"
