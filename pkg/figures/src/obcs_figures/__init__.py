"""Figure rendering for one-bit recovery sweep results.

This package never runs solvers or touches the sweep harness; it consumes
the records.csv / summary.csv files the harness writes and emits PNG files.
"""

__version__ = "0.1.0"
