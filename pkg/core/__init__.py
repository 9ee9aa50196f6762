"""
Core package for LatticeWire
"""
