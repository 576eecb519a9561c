"""Common-belief voting power.

Exact decisiveness, success and efficiency for weighted voting systems under
exchangeable (common-belief) voting measures, with large-N limits,
concentration bounds and a Monte Carlo cross-check.
"""
