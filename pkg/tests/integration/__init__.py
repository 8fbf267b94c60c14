"""
Integration tests - cross-solver checks and short end-to-end runs
"""
