"""indie: a miniature dependently typed proof kernel with an induction
tactic that keeps goals readable."""

__version__ = "0.1.0"
