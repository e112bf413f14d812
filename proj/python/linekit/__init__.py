"""Python bindings for the linekit C++ core.

Segments are (n, 4) float arrays of x1, y1, x2, y2; homographies are 3x3 arrays;
maps are (h, w) or (h, w, c) float32 arrays.
"""

from ._linekit import *  # noqa: F401,F403
from ._linekit import (  # noqa: F401
    DetectionParams,
    LinekitError,
    MatchParams,
    Scene,
)
