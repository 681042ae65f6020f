"""Exception types shared across the toolkit.

Every error raised on purpose by this package derives from
:class:`ProvBenchError`, so callers (notably the pipeline, which must
degrade a failing stage into an error status instead of crashing) can
catch one base class.
"""


class ProvBenchError(Exception):
    """Base class for all toolkit errors."""


class ParseError(ProvBenchError):
    """Malformed input document (Datalog, DOT, or JSON).

    Carries a human-readable position when the underlying parser tracks
    one; ``line`` and ``column`` are 1-based, or None for formats parsed
    by a third-party reader (JSON).
    """

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{line}:{column or 0}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class MixedGidError(ParseError):
    """A Datalog document mentions two distinct graph identifiers."""


class DanglingReferenceError(ProvBenchError):
    """An edge or property refers to an element id that does not exist."""


class ConflictingPropertyError(ProvBenchError):
    """Two different values were given for the same (element, key) pair."""


class IdClashError(ProvBenchError):
    """The same id is used both as a vertex id and as an edge id."""


class UnsupportedConstructError(ParseError):
    """Input uses a construct outside the supported DOT subset."""


class UnresolvedEndpointError(ProvBenchError):
    """A PROV relation endpoint cannot be resolved to a declared node."""


class BudgetExceededError(ProvBenchError):
    """A matcher search exhausted its node-expansion budget.

    This is an explicit, reportable outcome: callers must record the
    inconclusiveness rather than treat it as "no match".
    """


class OracleTooLargeError(ProvBenchError):
    """The brute-force oracle was handed an instance beyond its guard."""


class InvalidMatchingError(ProvBenchError):
    """A matching violates injectivity, labels, or edge structure."""


class InsufficientConsistentTrialsError(ProvBenchError):
    """Every similarity class was a singleton; rerun with more trials."""


class BackgroundNotEmbeddableError(ProvBenchError):
    """The background graph does not embed into the foreground graph.

    Recording is expected to be monotonic (append-only); when that
    assumption fails the comparison stage surfaces this diagnostic
    instead of silently producing a bogus difference.
    """


class MissingTrialFilesError(ProvBenchError):
    """A directory recorder lacks the requested number of trial files."""


class RecorderFailureError(ProvBenchError):
    """A recorder could not produce the requested usable documents."""


class CorruptBaselineError(ProvBenchError):
    """A stored regression baseline file could not be read back."""
