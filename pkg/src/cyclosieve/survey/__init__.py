"""Batch surveys over primes q: scans, searches, rank estimates and bounds."""

from .bounds import BoundsReport, bounds_report, is_regular
from .search import even_order_primes, estimate_kummer_rank, hypothesis_search
from .scan import ScanRecord, satisfaction_scan

__all__ = [
    "BoundsReport",
    "ScanRecord",
    "bounds_report",
    "estimate_kummer_rank",
    "even_order_primes",
    "hypothesis_search",
    "is_regular",
    "satisfaction_scan",
]
