"""Automated assessment engine: functional testing of submitted programs plus
generated multiple-choice questions about each learner's own code."""

__version__ = "0.1.0"
