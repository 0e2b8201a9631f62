"""
Core module for the submodular toolkit.

Contains configuration, logging, errors, and the exact set and vector types.
"""
