"""
Common modules package
"""

