"""Exact classification of homogeneous self-affine systems with lattice translations.

A system ``T_j x = A^{-1} x + u_j`` with integer expanding ``A`` and
``N = |det A|`` digits either tiles (open set condition, absolutely continuous
uniform measure) or has exact overlaps (singular measure).  This package
decides which, with checkable certificates for either answer.
"""

__version__ = "0.1.0"
