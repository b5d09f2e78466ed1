"""
Tests package

Organized test suite with async support
"""

