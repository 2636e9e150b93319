"""
Netgames - learning interaction networks from network-game equilibria
"""

__version__ = "1.0.0"
