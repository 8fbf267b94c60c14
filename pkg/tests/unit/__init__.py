"""
Unit tests - Fast, no external dependencies
"""
