"""Exact line covers of rational grids with multiplicity."""
