# cli/utils/progress.py
"""
Progress bars on stderr for long verification grids.
"""

import sys
from typing import Iterable, Optional

from tqdm import tqdm


def progress(iterable: Iterable, total: Optional[int] = None, desc: str = "", enabled: bool = True) -> Iterable:
    """Wraps ``iterable`` in a tqdm bar when enabled and stderr is a terminal."""
    if not enabled or not sys.stderr.isatty():
        return iterable
    return tqdm(iterable, total=total, desc=desc, file=sys.stderr, dynamic_ncols=True, leave=False)
