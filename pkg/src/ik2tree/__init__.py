"""Compressed self-indexes for ternary relations built on Interleaved k2-trees."""

from .bitvector import BitVector
from .errors import (FormatError, IK2Error, InputError, NavigationError, NotFoundError,
                     ParseError, UnsupportedStrategyError)
from .ik2tree import Any, Fixed, IK2Tree, NodeCursor, Range, Triple, TriplePattern
from .k2tree import K2Forest, K2Tree, MultiK2Tree
from .layout import LevelSchedule
from .rdf import Dictionary, RdfDataset, evaluate, ingest
from .temporal import ChangeRecord, Instant, Interval, Semantics, TemporalIndex

__version__ = "0.1.0"
