"""Tokenized building-data-asset ecosystem, desk scale.

A single-node, hash-chained, signature-verified ledger hosts unique data-asset
contracts with paired ownership/economic fungible tokens, an escrow exchange,
a certifier key store, license payments with gross-income dividend
distribution, a payment-gated datastore gateway, and a metadata search index.
"""

__version__ = "0.1.0"
