"""
Pydantic schemas for the toolkit.

Instance documents on the way in, reports on the way out.
"""

from .common import *
from .instance import *
from .reports import *
