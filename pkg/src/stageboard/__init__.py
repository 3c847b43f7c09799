"""Collaborative AI development planning with stage-centered harm evaluation."""

__version__ = "0.1.0"
