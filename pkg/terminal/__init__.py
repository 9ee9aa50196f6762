"""
Terminal package for LatticeWire
"""
