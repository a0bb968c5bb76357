"""Numerical core: circle functions, inner functions, model spaces, TTOs and the Crofoot transform."""
