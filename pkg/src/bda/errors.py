"""Error taxonomy for ledger transitions and services.

Every rejection carries a stable name (the class name) that is recorded in
block outcomes and surfaced through the CLI, so the same failure is
reported identically on submit, on seal, and on replay.
"""

from __future__ import annotations


class LedgerError(Exception):
    """Base class for all rule violations; the class name is the recorded reason."""

    def reason(self) -> str:
        message = str(self)
        return f"{type(self).__name__}: {message}" if message else type(self).__name__


def error_from_reason(reason: str) -> LedgerError:
    """Reconstruct the typed error recorded in a block outcome."""
    name, _, message = reason.partition(": ")
    cls = _BY_NAME.get(name, PayloadRejected)
    return cls(message or reason)


# --- transaction envelope ---------------------------------------------------


class BadSignature(LedgerError):
    pass


class BadNonce(LedgerError):
    pass


class PayloadRejected(LedgerError):
    pass


class UnknownPath(LedgerError):
    pass


# --- accounts ----------------------------------------------------------------


class DuplicateKey(LedgerError):
    pass


class UnauthorizedWhitelist(LedgerError):
    pass


class UnknownAccount(LedgerError):
    pass


class NotAdmin(LedgerError):
    pass


# --- asset tokens ------------------------------------------------------------


class NotTokenizer(LedgerError):
    pass


class OwnerNotWhitelisted(LedgerError):
    pass


class BadSupply(LedgerError):
    pass


class InsufficientBalance(LedgerError):
    pass


class NotWhitelisted(LedgerError):
    pass


class NotSigner(LedgerError):
    pass


class WrongAmount(LedgerError):
    pass


class AssetRetired(LedgerError):
    pass


class InsufficientCash(LedgerError):
    pass


class UnknownAsset(LedgerError):
    pass


class NotOwnershipHolder(LedgerError):
    pass


class ProposalExpired(LedgerError):
    pass


class AlreadyRetired(LedgerError):
    pass


# --- tokenizer bridge ---------------------------------------------------------


class BadConsent(LedgerError):
    pass


class DuplicateContract(LedgerError):
    pass


# --- exchange -----------------------------------------------------------------


class OrderClosed(LedgerError):
    pass


class Overfill(LedgerError):
    pass


class NotSeller(LedgerError):
    pass


# --- certifier registry --------------------------------------------------------


class NotActive(LedgerError):
    pass


class NotActiveCertifier(LedgerError):
    pass


class MalformedRecord(LedgerError):
    pass


# --- datastore gateway ----------------------------------------------------------


class NotOwner(LedgerError):
    pass


class NoValidPayment(LedgerError):
    pass


class UnknownQueryField(LedgerError):
    pass


class UnknownLicense(LedgerError):
    pass


class PayloadDeleted(LedgerError):
    pass


class StatusMismatch(LedgerError):
    pass


# --- search index -----------------------------------------------------------------


class LedgerUnavailable(LedgerError):
    pass


_BY_NAME = {
    cls.__name__: cls
    for cls in list(globals().values())
    if isinstance(cls, type) and issubclass(cls, LedgerError)
}
