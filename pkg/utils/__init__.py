"""
Utilities package
"""

