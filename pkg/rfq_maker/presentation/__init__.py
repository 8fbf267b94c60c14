"""
Presentation Layer

Command-line surface and the controllers behind it.
"""
