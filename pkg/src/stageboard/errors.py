"""Domain error hierarchy.

Every error that can cross the service boundary derives from DomainError and
surfaces on the wire with its class name as the machine-readable code.
"""
from __future__ import annotations

from typing import Any


class DomainError(Exception):
    """Base class; `code` is the wire-visible error name."""

    def __init__(self, message: str = "", **detail: Any):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.detail = detail

    @property
    def code(self) -> str:
        return self.__class__.__name__


# plan graph
class NonFinitePosition(DomainError): pass
class UnknownBlock(DomainError): pass
class SelfLink(DomainError): pass
class DuplicateLink(DomainError): pass
class CycleCreated(DomainError): pass


# prompt rendering
class EmptyPlan(DomainError): pass


# harm evaluation
class EmptyText(DomainError): pass
class UnknownEvaluation(DomainError): pass
class OutOfRange(DomainError): pass
class TaxonomyMismatch(DomainError): pass
class UnknownSpecificHarm(DomainError): pass


# personas
class EmptyDescription(DomainError): pass
class WrongPhase(DomainError): pass
class UnknownPersona(DomainError): pass
class PlanIncomplete(DomainError): pass
class EmptyResponse(DomainError): pass
class ParseMismatch(DomainError): pass


# llm gateway
class LlmUnavailable(DomainError): pass
class Timeout(DomainError): pass
class ProviderRejected(DomainError): pass


# store
class UnknownProject(DomainError): pass
class UnknownRevision(DomainError): pass
class RevisionConflict(DomainError): pass
class FixtureMissing(DomainError): pass


class ValidationFailed(DomainError):
    """Commit-level wrapper: the mutation violated a domain invariant.

    Carries the underlying domain error; the wire layer reports the
    innermost error's code.
    """

    def __init__(self, cause: DomainError):
        super().__init__(cause.message, **cause.detail)
        self.cause = cause


# workflow / api
class IllegalTransition(DomainError): pass
class ForbiddenRole(DomainError): pass
class HandoffValidationFailed(DomainError): pass
class NotAMember(DomainError): pass
class Unauthenticated(DomainError): pass
class UnsupportedProtocolVersion(DomainError): pass
class UnsupportedFormat(DomainError): pass


def innermost(err: DomainError) -> DomainError:
    """Unwrap ValidationFailed chains to the root domain error."""
    while isinstance(err, ValidationFailed):
        err = err.cause
    return err
