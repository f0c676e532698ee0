"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class PerfceError(Exception):
    """Base class for every domain error raised by this package."""


class CycleDetected(PerfceError):
    """A directed cycle makes the graph invalid as a causal DAG."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"graph contains a cycle: {' -> '.join(self.cycle)}")


class UnknownNode(PerfceError):
    """A queried name does not exist in the graph / dataset."""


class ParseError(PerfceError):
    """A data file row could not be parsed."""

    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class SchemaError(PerfceError):
    """A file header or document structure violates the expected schema."""


class DegenerateData(PerfceError):
    """Zero-variance or collinear inputs make an estimate undefined."""


class NoUsableColumns(PerfceError):
    """Fewer than two non-constant columns remain after filtering."""


class InsufficientFolds(PerfceError):
    """Cross-fitting requested with too few folds or too little data."""


class WeakInstrument(PerfceError):
    """The instrument barely moves the treatment; 2SLS is unreliable."""

    def __init__(self, instrument, treatment, first_stage_r2, threshold):
        self.instrument = instrument
        self.treatment = treatment
        self.first_stage_r2 = first_stage_r2
        super().__init__(
            f"instrument {instrument!r} explains r2={first_stage_r2:.2e} of "
            f"{treatment!r}, below threshold {threshold}"
        )


class InvalidInstrument(PerfceError):
    """The proposed instrument is not a chaos variable and was not whitelisted."""


class UnknownChaosVariable(PerfceError):
    """A manifest references a chaos variable the system does not declare."""


class UnknownAnomalyKind(PerfceError):
    """The requested anomaly kind is not in the system's catalog."""


class UnquantifiedEdge(PerfceError):
    """An edge whose effect failed to fit was needed for propagation."""

    def __init__(self, parent, child):
        self.parent = parent
        self.child = child
        super().__init__(f"edge {parent} -> {child} has no fitted effect")


class NotAnAncestor(PerfceError):
    """An intervention target is not an ancestor of the queried KPI."""

    def __init__(self, names, target):
        self.names = list(names)
        self.target = target
        super().__init__(
            f"{', '.join(self.names)} not ancestor(s) of {target!r}"
        )


class EmptySamples(PerfceError):
    """A density fit was requested on an empty sample set."""


class LengthMismatch(PerfceError):
    """Paired sequences have different lengths."""


class EmptyRelevantSet(PerfceError):
    """A ranking metric needs at least one relevant item."""
