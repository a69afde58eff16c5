"""Exception hierarchy shared across the engine.

Every error the public API can raise derives from :class:`FacetForgeError`
and carries a stable machine-readable ``code`` used by the HTTP gateway.
"""

from __future__ import annotations


class FacetForgeError(Exception):
    """Base class for all engine errors."""

    code = "error"


# --- store ---------------------------------------------------------------

class MalformedTerm(FacetForgeError):
    code = "malformed_term"


class EmptyQuery(FacetForgeError):
    code = "empty_query"


class IoFailure(FacetForgeError):
    code = "io_failure"


class ParseError(FacetForgeError):
    """Line-oriented parse failure; ``line`` is 1-based."""

    code = "parse_error"

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --- taxonomy ------------------------------------------------------------

class EmptyLabel(FacetForgeError):
    code = "empty_label"


class DuplicatePortlet(FacetForgeError):
    code = "duplicate_portlet"


class CyclicPortlet(FacetForgeError):
    code = "cyclic_portlet"


# --- matcher -------------------------------------------------------------

class DimensionMismatch(FacetForgeError):
    code = "dimension_mismatch"


class DegenerateTraining(FacetForgeError):
    code = "degenerate_training"


# --- joint meaning -------------------------------------------------------

class UnmatchedTag(FacetForgeError):
    code = "unmatched_tag"


# --- navigation ----------------------------------------------------------

class AlreadyZoomed(FacetForgeError):
    code = "already_zoomed"


class EmptyZoomStack(FacetForgeError):
    code = "empty_zoom_stack"


class Unreachable(FacetForgeError):
    code = "unreachable"


class UnknownNode(FacetForgeError):
    code = "unknown_node"


# --- evaluation ----------------------------------------------------------

class BadWeights(FacetForgeError):
    code = "bad_weights"


class EmptyMatrix(FacetForgeError):
    code = "empty_matrix"


# --- gateway -------------------------------------------------------------

class NotFound(FacetForgeError):
    code = "not_found"


class PortInUse(FacetForgeError):
    code = "port_in_use"


class StorageUnavailable(FacetForgeError):
    code = "storage_unavailable"
