"""Exact computations on q-deformed and theta-deformed spheres.

Subpackages and modules:

* :mod:`ncspheres.scalars`: exact coefficient rings.
* :mod:`ncspheres.ncalg`: presented *-algebras, matrices and cyclic chains.
* :mod:`ncspheres.qspheres`: the quantum spheres and their K-theory classes.
* :mod:`ncspheres.representations`: weighted-shift representations and traces.
* :mod:`ncspheres.fredholm`: cyclic cocycles, Fredholm modules and pairings.
* :mod:`ncspheres.theta`: theta-deformations and the twist calculus.
* :mod:`ncspheres.cli`: the command line front end.
"""

__version__ = "0.1.0"
