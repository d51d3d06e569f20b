"""Computable pieces of the j-field framework: the j q-expansion and its
third-order differential equation, modular polynomials, the geodesic
pregeometry on GL2(Q)-orbits, formal j-derivations and the predimension."""

__version__ = "0.1.0"
