"""
Acceptance tests - reference rewards and learning runs (slow)
"""
