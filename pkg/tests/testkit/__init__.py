"""Brute-force oracles and seeded generators for the test suite.

Deliberately naive: the oracles re-derive their answers by exhaustive
enumeration and share no algorithmic code with the library paths they
check.  Not part of the public package.
"""
from .generators import Generator
from .oracles import (
    all_functions,
    oracle_entails,
    oracle_universal,
    satisfies,
)

__all__ = ["Generator", "all_functions", "oracle_entails", "oracle_universal", "satisfies"]
