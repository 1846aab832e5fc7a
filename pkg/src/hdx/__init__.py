"""Spectral, cohomological and isoperimetric analysis of weighted simplicial
complexes as high-dimensional expander candidates."""

__version__ = "0.1.0"
