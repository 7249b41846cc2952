"""Uniform sampling of constrained graphs via switch-type Markov chains.

The package bundles four lazy chains (switch, Jerrum-Sinclair insertion/deletion,
hinge flip, restricted switch, plus bipartite variants), exact state-space
diagnostics for desk-scale instances, stability checks for degree families, and
the canonical-path machinery used to certify rapid mixing on small instances.
"""

__version__ = "0.1.0"
