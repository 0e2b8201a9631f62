"""
Repositories module for the toolkit.

Contains on-disk access to instance documents.
"""
