"""Mini-CSP interpreter and explicit-state verifier for symmetric process systems.

Submodules:

* :mod:`cspsym.graph` -- networks, permutations, automorphism search
* :mod:`cspsym.extension` -- symmetry-preserving extensions of peer-to-peer networks
* :mod:`cspsym.lang` -- program syntax, parser, dialect checks, systems
* :mod:`cspsym.engine` -- operational semantics and state-space exploration
* :mod:`cspsym.checkers` -- pairwise synchronization, electoral and symmetry checks
* :mod:`cspsym.library` -- generators for the concrete systems and transformations
* :mod:`cspsym.cli` -- command line entry point
"""

__version__ = "0.1.0"
