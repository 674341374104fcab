"""Exception types shared across the runtime.

Contract violations and audit errors are deliberately distinct: a
ContractViolationError means role or caller code broke a wrapper
precondition (a bug in the code under test), while TableAuditError means
the runtime itself failed one of its internal soundness checks.
"""

from __future__ import annotations


class DymonError(Exception):
    pass


class EncodingError(DymonError):
    """pair_encode input too large for the length prefix."""


class MalformedPairError(DymonError):
    """pair_decode framing error: short prefix or declared length overrun."""


class AuthFailureError(DymonError):
    """Authenticated decryption rejected the ciphertext."""


class ContractViolationError(DymonError):
    """A wrapper precondition was violated by the calling code."""

    def __init__(self, location: str, reason: str):
        super().__init__(f"{location}: {reason}")
        self.location = location
        self.reason = reason


class TableAuditError(DymonError):
    """Internal invariant of the representation table or log was broken."""


class TermSyntaxError(DymonError):
    """Unparseable canonical term or event rendering."""


class AttackSyntaxError(DymonError):
    """Attack program rejected by the grammar or its validation items."""

    def __init__(self, line: int, item: int, reason: str):
        super().__init__(f"line {line}: {reason} (grammar item {item})")
        self.line = line
        self.item = item
        self.reason = reason
