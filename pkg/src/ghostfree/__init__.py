"""Ghost-free quantisation of a coupled quadratic oscillator with a negative kinetic term.

Non-unitary similarity maps act on quadratic Hamiltonians as complex symplectic
matrices and on Gaussian ground states in closed form; the package checks the
resulting eigen-equations and scans where the transformed states are normalisable.
"""

__version__ = "0.1.0"
