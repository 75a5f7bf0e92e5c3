"""Maximum central decompositions of p-groups of class 2 via adjoint rings."""

__version__ = "0.1.0"
