"""Ridesharing explanation lab.

Exact shared-ride assignment on a road network, fare and time quotes for the
shared ride and its alternatives, comparative explanations, three selection
agents, and the disclosure game behind full revelation.
"""

__version__ = "0.1.0"
