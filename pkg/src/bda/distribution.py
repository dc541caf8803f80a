"""Gross-income dividend distribution for license payments.

Every cash unit a consumer pays is split into two pools: economic-token
holders receive half (rounded down) and ownership-token holders receive the
rest, so an odd unit lands with the owners. Each pool is then apportioned to
holders proportionally to their balances using the largest-remainder method,
which keeps the distributed total exactly equal to the pool.
"""

from __future__ import annotations

from dataclasses import dataclass

KIND_OWNERSHIP = "ownership"
KIND_ECONOMIC = "economic"


@dataclass(frozen=True)
class Payout:
    """One dividend credit: account, token kind that earned it, and amount."""

    account: str
    kind: str
    amount: int


def split_pools(amount: int) -> tuple[int, int]:
    """Split a gross payment into (economic_pool, ownership_pool).

    The ownership pool receives the extra unit of an odd amount.
    """
    if amount <= 0:
        raise ValueError("amount must be positive")
    economic = amount // 2
    return economic, amount - economic


def apportion(pool: int, balances: dict[str, int]) -> dict[str, int]:
    """Largest-remainder apportionment of an integer pool over holder balances.

    Each holder's exact share is pool * balance / total. Holders first get the
    floor of their share; the leftover units go to the largest fractional
    remainders, ties broken by ascending account id. The result sums to the
    pool exactly and every allocation is within one unit of the exact share.
    """
    holders = {account: bal for account, bal in balances.items() if bal > 0}
    if pool < 0:
        raise ValueError("pool must be non-negative")
    if pool == 0:
        return {}
    if not holders:
        raise ValueError("cannot apportion a positive pool with no holders")
    total = sum(holders.values())
    shares: dict[str, int] = {}
    remainders: dict[str, int] = {}
    for account, balance in holders.items():
        # exact share = pool*balance/total; remainder compared via the common
        # denominator so no floating point is involved
        shares[account] = pool * balance // total
        remainders[account] = pool * balance % total
    leftover = pool - sum(shares.values())
    for account in sorted(holders, key=lambda a: (-remainders[a], a))[:leftover]:
        shares[account] += 1
    return {account: share for account, share in shares.items() if share > 0}


def distribute_payment(
    amount: int,
    economic_balances: dict[str, int],
    ownership_balances: dict[str, int],
) -> list[Payout]:
    """Compute the full payout list for one gross payment.

    Balances must be the holdings at the payment's block height; later
    transfers never change a recorded distribution. The payouts sum to the
    amount exactly: nothing is lost and nothing is minted.
    """
    economic_pool, ownership_pool = split_pools(amount)
    payouts: list[Payout] = []
    for account, share in sorted(apportion(economic_pool, economic_balances).items()):
        payouts.append(Payout(account=account, kind=KIND_ECONOMIC, amount=share))
    for account, share in sorted(apportion(ownership_pool, ownership_balances).items()):
        payouts.append(Payout(account=account, kind=KIND_OWNERSHIP, amount=share))
    return payouts
