"""Discrete-event GossipSub simulator for large-message dissemination."""

__version__ = '0.1.0'
