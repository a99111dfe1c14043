"""K-theory of Toeplitz and Cuntz-Pimsner algebras of finitely generated
bimodules over finite-dimensional commutative coefficient algebras, with
numerical relation checks on truncated Fock modules."""

__version__ = "0.1.0"
