"""Desk-scale numerics for gauge-theory flow equations and knot polynomials.

Subpackages and modules:

* ``algebra`` -- su(N) matrix arithmetic, principal triples, trace form
* ``fields`` -- structured grids, adjoint-valued lattice forms, exterior calculus
* ``functionals`` -- Chern-Simons functionals, Morse functions, moment map, gradients
* ``kwflow`` -- four-dimensional residual evaluators, gradient-flow stepping,
  flow/instanton and flow/residual equivalence checks, instanton number
* ``reduced`` -- Nahm's equations on the half-line, Bogomolny residuals,
  commuting-operator residuals
* ``knots`` -- planar-diagram codes, Kauffman bracket, vertex-model Jones polynomial
* ``cli`` -- command-line front end emitting JSON reports and CSV tables
"""

__version__ = "0.1.0"
