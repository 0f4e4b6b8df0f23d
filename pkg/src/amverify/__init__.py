"""Finite verifications behind rational curves on Artin-Mumford double solids:
lines and conic bundles on the degree-2 del Pezzo surface, the sign lemma,
intersection arithmetic and torsion bookkeeping on the blown-up double solid,
and Riemann-Roch on Enriques surfaces."""

__version__ = "0.1.0"
