"""Exact symbolic computation with differential biquivers.

The package models boxes (biquivers with a graded differential), the
reduction calculus on them (regularization, minimal-edge splitting, pair
elimination, self-reproduction), exact representation theory over the
rationals and prime fields (Hom spaces, bricks, isomorphism), the
one-parameter brick family construction with a brute-force oracle, and the
box attached to the coadjoint action of a basic finite-dimensional algebra.
"""

__version__ = "0.1.0"
