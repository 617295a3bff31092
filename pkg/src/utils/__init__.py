"""Utility helpers for cfs-lab: document I/O, CSV tables, plots and errors."""
