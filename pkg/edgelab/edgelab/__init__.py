"""
Edge Lab

Rank-one barrier walks that certify the extreme eigenvalues of empirical
covariance matrices, together with isotropic samplers, tail-projection
testers and a Monte Carlo harness for the Marchenko-Pastur edges.
"""

__version__ = "0.1.0"
