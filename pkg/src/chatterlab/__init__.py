"""Chattering shortest paths in polyhedral Finsler and sub-Finsler geometry."""

__version__ = "0.1.0"
