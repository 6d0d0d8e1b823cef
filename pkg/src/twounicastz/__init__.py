"""Linear network coding workbench for the two-unicast-Z problem."""

from __future__ import annotations

from .coder import (
    CodingState,
    RateReport,
    RetryExhausted,
    contains_one_one,
    final_triple,
    grank,
    rate_region,
    recursive_coding,
)
from .gf import FieldConfig, FieldMatrix
from .mfmc import UnicastProblem, single_unicast_code
from .netgraph import DagParams, Network, gns_bound, random_dag
from .reduction import ReductionSequence, reduce

try:
    from importlib.metadata import version as _version

    __version__ = _version("twounicastz")
except Exception:  # not installed
    __version__ = "0+unknown"

__all__ = [
    "CodingState",
    "DagParams",
    "FieldConfig",
    "FieldMatrix",
    "Network",
    "RateReport",
    "ReductionSequence",
    "RetryExhausted",
    "UnicastProblem",
    "contains_one_one",
    "final_triple",
    "gns_bound",
    "grank",
    "random_dag",
    "rate_region",
    "recursive_coding",
    "reduce",
    "single_unicast_code",
]
