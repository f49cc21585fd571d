"""Exact computations with n-th differential modules over GF(p) and Q."""
