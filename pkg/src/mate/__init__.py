"""Mistake-driven dialogue-feedback synthesis, refinement, and evaluation
for training counseling supervision models, plus a live practice service."""

__version__ = "0.1.0"
