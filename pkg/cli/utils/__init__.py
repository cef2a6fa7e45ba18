# cli/utils/__init__.py
"""
Helpers of the command layer: progress display.
"""

from .progress import progress

__all__ = ["progress"]
