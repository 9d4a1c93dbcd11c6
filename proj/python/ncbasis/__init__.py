"""Haar systems in weighted matrix algebras.

Thin re-export of the compiled extension: construction of the inductive
Haar systems, coefficient expansion, weighted Schatten norms and the
partial-sum norm certification toolkit.
"""

try:
    from ._ncbasis import *  # noqa: F401,F403  (installed layout)
except ImportError:
    from _ncbasis import *  # noqa: F401,F403  (build-tree layout)
