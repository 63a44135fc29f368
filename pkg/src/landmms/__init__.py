"""Fair division of rectangular land under l-infinity separation with maximin-share guarantees."""
from .geometry import Rect, Shape, rect
from .valuation import GridValuation, QueryLog

__all__ = ["Rect", "Shape", "rect", "GridValuation", "QueryLog"]
__version__ = "0.1.0"
