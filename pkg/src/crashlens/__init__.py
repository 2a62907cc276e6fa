"""Crash-condition inference for a small untyped constructor language."""

import sys

# Types and terms are deep trees processed by structural recursion.
if sys.getrecursionlimit() < 20_000:
    sys.setrecursionlimit(20_000)

__version__ = "0.1.0"
