"""
Plugins package for LatticeWire
"""
