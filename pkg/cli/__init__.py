"""
Command handlers. Each module holds one command; main.py registers them.
"""
