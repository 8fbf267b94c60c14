"""
Test suite for RFQ Maker
"""
