"""Separable cones in E_m (x) S(n) and related block spaces: membership, decomposition, certificates."""
