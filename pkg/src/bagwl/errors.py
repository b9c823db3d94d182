"""Exception types and the shared solver verdict."""

from __future__ import annotations

import enum


class BagwlError(Exception):
    """Base class for all errors raised by this package."""


class OutOfRange(BagwlError):
    """A vertex id lies outside 0..n-1."""


class SelfLoop(BagwlError):
    """An edge joins a vertex to itself."""


class InvalidPartition(BagwlError):
    """Class list does not partition the vertex set."""


class DuplicateClassMember(BagwlError):
    """A vertex appears in more than one equivalence class line."""


class PermutationMismatch(BagwlError):
    """An ordering is not a permutation of its equivalence class."""


class ParseError(BagwlError):
    """Malformed input text.  Carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SameVertex(BagwlError):
    """Both endpoints of a disjoint-path query coincide."""


class EmptyRoot(BagwlError):
    """A decomposition root set must be nonempty."""


class NotConnected(BagwlError):
    """The operation requires a connected graph."""


class WidthMismatch(BagwlError):
    """Invalid refinement dimensions for the given families."""


class CapExceeded(BagwlError):
    """A configured work cap (tuple count, brute-force size) would be exceeded."""


class TooLarge(CapExceeded):
    """Instance exceeds the brute-force size cap."""


class FamilyTooLarge(CapExceeded):
    """Generated bag family exceeds the size cap."""


class ClassTooLarge(BagwlError):
    """An equivalence class is larger than the gadget encoding permits."""


class BadParams(BagwlError):
    """Generator parameters outside the supported range."""


class Verdict(enum.Enum):
    """Outcome of an isomorphism test.

    INFEASIBLE means the method's structural precondition failed (for
    example a connectivity class larger than the width parameter allows),
    so the test neither accepts nor rejects the pair.
    """

    ACCEPT = "accept"
    REJECT = "reject"
    INFEASIBLE = "infeasible"

    @property
    def exit_code(self) -> int:
        return {"accept": 0, "reject": 1, "infeasible": 2}[self.value]
