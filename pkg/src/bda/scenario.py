"""Deterministic scenario driver: bootstraps the whole ecosystem end to end
and runs multi-round economic simulations.

All randomness flows from one seeded generator (actor keys included) and the
block clock is logical, so a scenario is reproducible to the byte: same seed
and script, same event log, same final state root.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any

from bda import payloads
from bda.assets import audited_flag_findings
from bda.bridge import ContractTerms, execute_contract
from bda.certifiers import certify_record
from bda.crypto import KeyPair
from bda.errors import LedgerError
from bda.gateway import DatastoreGateway, sign_request
from bda.ledger import Ledger, make_genesis
from bda.records import BuildingDataRecord
from bda.search import SearchIndex

LOGICAL_EPOCH = 1_700_000_000


class ScenarioAbort(Exception):
    """A scenario step failed; carries the step label and the causing error."""

    def __init__(self, step: str, cause: LedgerError):
        super().__init__(f"aborted at step {step}: {cause.reason()}")
        self.step = step
        self.cause = cause


def make_logical_clock(start: int = LOGICAL_EPOCH):
    """A deterministic clock: each reading advances one second."""
    counter = {"now": start}

    def clock() -> int:
        counter["now"] += 1
        return counter["now"]

    return clock


@dataclass
class Actor:
    name: str
    key: KeyPair
    roles: list[str]
    whitelisted: bool = False
    cash: int = 0

    @property
    def account_id(self) -> str:
        return self.key.account_id.hex()


class World:
    """A ledger, gateway, and search index wired up with seeded actors."""

    def __init__(self, seed: int, chain_id: str, actors: list[dict], data_dir=None):
        self.rng = random.Random(seed)
        self.clock = make_logical_clock()
        self.actors: dict[str, Actor] = {}
        admin_spec = {"name": "admin", "roles": ["admin"], "whitelisted": True, "cash": 0}
        gateway_spec = {"name": "gateway", "roles": ["admin"], "whitelisted": False, "cash": 0}
        genesis_accounts = []
        for spec in [admin_spec, gateway_spec] + actors:
            actor = Actor(
                name=spec["name"],
                key=KeyPair.from_seed(self.rng.randbytes(32)),
                roles=list(spec["roles"]),
                whitelisted=bool(spec.get("whitelisted", False)),
                cash=int(spec.get("cash", 0)),
            )
            if actor.name in self.actors:
                raise ValueError(f"duplicate actor name {actor.name!r}")
            self.actors[actor.name] = actor
            genesis_accounts.append(
                {
                    "public_key": actor.key.public_bytes.hex(),
                    "roles": actor.roles,
                    "whitelisted": actor.whitelisted,
                    "cash": actor.cash,
                }
            )
        genesis = make_genesis(chain_id, genesis_accounts, faucet_enabled=True)
        self.ledger = Ledger.create(genesis, data_dir=data_dir, clock=self.clock)
        gateway_root = None if data_dir is None else f"{data_dir}/store"
        self.gateway = DatastoreGateway(
            self.ledger, self.actors["gateway"].key, root=gateway_root
        )
        self.index = SearchIndex(self.ledger)

    def __getitem__(self, name: str) -> Actor:
        return self.actors[name]

    def cash(self, name: str) -> int:
        return self.ledger.state.cash_balance(self.actors[name].account_id)

    def balance(self, asset_id: str, kind: str, name: str) -> int:
        return self.ledger.state.balance(asset_id, kind, self.actors[name].account_id)


# --- bootstrap scenario ------------------------------------------------------


@dataclass
class BootstrapConfig:
    """Knobs for the end-to-end flow; defaults give hand-checkable dividends."""

    seed: int = 42
    chain_id: str = "bda-bootstrap"
    license_fee: int = 100
    ownership_supply: int = 1_000_000
    economic_supply: int = 1_000_000
    ownership_sale_amount: int = 200_000
    ownership_unit_price: int = 2
    economic_sale_amount: int = 500_000
    economic_unit_price: int = 1
    investor1_fill_economic: int = 400_000
    investor2_fill_economic: int = 100_000
    investor_cash: int = 1_000_000
    consumer_cash: int = 200
    ownership_buyer_whitelisted: bool = True
    skip_payment: bool = False
    building_ref: str = "BLDG-0007"
    jurisdiction: str = "SG"
    category: str = "wiring"
    keywords: tuple[str, ...] = ("wiring", "diagram", "tower")
    query_terms: tuple[str, ...] = ("wiring", "diagram")


@dataclass
class BootstrapReport:
    """Everything the end-to-end run produced, renderable as text or JSON."""

    steps: list[dict] = field(default_factory=list)
    event_log: list[str] = field(default_factory=list)
    dividends: dict[str, int] = field(default_factory=dict)
    license: dict | None = None
    asset_id: str | None = None
    state_root: str = ""

    def log(self, line: str) -> None:
        self.event_log.append(line)

    def step(self, label: str, title: str, details: list[str]) -> None:
        self.steps.append({"step": label, "title": title, "details": details})
        self.log(f"step {label}: {title}")
        for detail in details:
            self.log(f"  {detail}")

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "steps": self.steps,
            "dividends": self.dividends,
            "license": self.license,
            "asset_id": self.asset_id,
            "state_root": self.state_root,
            "event_log": self.event_log,
        }

    def to_text(self) -> str:
        lines = ["BOOTSTRAP SCENARIO REPORT", "=" * 60]
        lines.extend(self.event_log)
        lines.append("=" * 60)
        lines.append(f"final state root: {self.state_root}")
        return "\n".join(lines)


def _snapshot_balances(world: World, report: BootstrapReport, asset_id: str | None) -> None:
    for name, actor in sorted(world.actors.items()):
        parts = [f"cash={world.cash(name)}"]
        if asset_id is not None:
            parts.append(f"ownership={world.balance(asset_id, 'ownership', name)}")
            parts.append(f"economic={world.balance(asset_id, 'economic', name)}")
        report.log(f"  balance {name}: {' '.join(parts)}")


def run_bootstrap_scenario(
    config: BootstrapConfig | None = None, data_dir=None
) -> BootstrapReport:
    """Drive the full flow: collect, certify, contract, mint, trade, search,
    pay, retrieve, distribute. Any step failure aborts with its step number."""
    cfg = config or BootstrapConfig()
    report = BootstrapReport()
    world = World(
        seed=cfg.seed,
        chain_id=cfg.chain_id,
        actors=[
            {"name": "owner1", "roles": ["owner"], "whitelisted": True},
            {"name": "tokenizer1", "roles": ["tokenizer"]},
            {"name": "certifier1", "roles": ["certifier"]},
            {
                "name": "investor1",
                "roles": ["investor"],
                "whitelisted": cfg.ownership_buyer_whitelisted,
                "cash": cfg.investor_cash,
            },
            {"name": "investor2", "roles": ["investor"], "cash": cfg.investor_cash},
            {"name": "consumer1", "roles": ["consumer"], "cash": cfg.consumer_cash},
        ],
        data_dir=data_dir,
    )
    ledger, gateway = world.ledger, world.gateway
    admin = world["admin"]

    def run(step: str, actor_key: KeyPair, payload: dict) -> str:
        try:
            txid, _ = ledger.transact(actor_key, payload)
            return txid
        except LedgerError as exc:
            raise ScenarioAbort(step, exc) from exc

    # step 0: the certifier joins the on-ledger key store
    run("0", admin.key, payloads.register_certifier(world["certifier1"].account_id, "licensed electrical surveyor"))
    report.step("0", "setup", [f"chain {cfg.chain_id}", "certifier accredited in key store"])

    # step 1: contractors collect building data in the prescribed format
    record = BuildingDataRecord(
        building_ref=cfg.building_ref,
        category=cfg.category,
        jurisdiction=cfg.jurisdiction,
        payload=b"wiring diagram, riser + per-floor circuits",
        created_at=LOGICAL_EPOCH,
        updated_at=LOGICAL_EPOCH,
    )
    record_bytes = record.to_bytes()
    content_hash = gateway.store_record(world["owner1"].account_id, record_bytes)
    report.step("1", "building data collected", [f"record stored, content hash {content_hash}"])

    # step 2: data passes to the owner; the expert certifies it
    try:
        certification = certify_record(
            ledger.state, world["certifier1"].key, record_bytes, asset_id="0" * 64,
            timestamp=LOGICAL_EPOCH,
        )
    except LedgerError as exc:
        raise ScenarioAbort("2", exc) from exc
    report.step("2", "record certified by accredited expert", [f"certifier {certification.certifier}"])

    # step 3: the owner signs binding contract terms with the tokenizer
    terms = ContractTerms(
        owner=world["owner1"].account_id,
        tokenizer=world["tokenizer1"].account_id,
        metadata={
            "building_ref": cfg.building_ref,
            "category": cfg.category,
            "jurisdiction": cfg.jurisdiction,
            "keywords": list(cfg.keywords),
            "audited": False,
        },
        pointer={"content_hash": content_hash, "locator": "gateway/local"},
        license_fee=cfg.license_fee,
        ownership_supply=cfg.ownership_supply,
        economic_supply=cfg.economic_supply,
    )
    terms = terms.signed_by_owner(world["owner1"].key).signed_by_tokenizer(world["tokenizer1"].key)
    report.step("3", "contract terms dual-signed", [f"terms hash {terms.hash()}"])

    # step 4: the tokenizer mints; all tokens land with the owner
    try:
        asset_id = execute_contract(ledger, terms, world["tokenizer1"].key)
    except LedgerError as exc:
        raise ScenarioAbort("4", exc) from exc
    report.asset_id = asset_id
    gateway.sync()
    # the expert's signature is re-issued against the real asset id and filed
    certification = certify_record(
        ledger.state, world["certifier1"].key, record_bytes, asset_id=asset_id,
        timestamp=LOGICAL_EPOCH,
    )
    run("4", world["owner1"].key, payloads.attach_certification(asset_id, certification.to_dict()))
    run("4", world["owner1"].key, payloads.vote(asset_id, "set_audited", True))
    report.step("4", "asset minted and marked audited", [f"asset {asset_id}"])
    _snapshot_balances(world, report, asset_id)

    # step 5: owner lists part of the ownership; a whitelisted buyer fills
    ownership_order = run(
        "5",
        world["owner1"].key,
        payloads.place_order(asset_id, "ownership", cfg.ownership_sale_amount, cfg.ownership_unit_price),
    )
    run("5", world["investor1"].key, payloads.fill_order(ownership_order, cfg.ownership_sale_amount))
    report.step(
        "5",
        "ownership stake sold on the exchange",
        [f"{cfg.ownership_sale_amount} ownership @ {cfg.ownership_unit_price}"],
    )

    # step 6: owner raises capital by selling economic tokens
    economic_order = run(
        "6",
        world["owner1"].key,
        payloads.place_order(asset_id, "economic", cfg.economic_sale_amount, cfg.economic_unit_price),
    )
    run("6", world["investor1"].key, payloads.fill_order(economic_order, cfg.investor1_fill_economic))
    run("6", world["investor2"].key, payloads.fill_order(economic_order, cfg.investor2_fill_economic))
    report.step(
        "6",
        "economic tokens sold to investors",
        [
            f"investor1 bought {cfg.investor1_fill_economic}",
            f"investor2 bought {cfg.investor2_fill_economic}",
        ],
    )
    _snapshot_balances(world, report, asset_id)

    # steps 7a-7b: the consumer finds the asset on the search platform
    world.index.sync_from_ledger()
    hits = world.index.query(list(cfg.query_terms), audited_only=True)
    if not hits or hits[0].asset_id != asset_id:
        raise ScenarioAbort("7a", LedgerError("search did not surface the asset"))
    report.step(
        "7a-7b",
        "search returned the asset contract address and fee",
        [f"asset {hits[0].asset_id}", f"license fee {hits[0].license_fee}"],
    )

    # step 7c: the consumer pays the asset contract
    cash_before = {name: world.cash(name) for name in world.actors}
    payment_id = None
    if not cfg.skip_payment:
        payment_id = run("7c", world["consumer1"].key, payloads.pay_license(asset_id, hits[0].license_fee))
        report.step("7c", "consumer paid the license fee", [f"payment {payment_id}"])
    else:
        report.step("7c", "consumer payment SKIPPED by config", [])

    # steps 7d-7i: gated retrieval against the on-ledger payment log
    request_payment = payment_id if payment_id is not None else "0" * 64
    request = {
        "action": "request",
        "consumer": world["consumer1"].account_id,
        "asset_id": asset_id,
        "payment_id": request_payment,
        "query": None,
    }
    try:
        view, receipt = gateway.request_data(
            consumer=world["consumer1"].account_id,
            asset_id=asset_id,
            payment_id=request_payment,
            signature=sign_request(request, world["consumer1"].key),
            query=None,
        )
    except LedgerError as exc:
        raise ScenarioAbort("7e", exc) from exc
    report.license = receipt.to_dict()
    report.step(
        "7d-7i",
        "data and license released after payment verification",
        [f"license {receipt.license_id}", f"record bytes {len(view['payload'])}"],
    )

    # steps 8a-8b: the payment was distributed to token holders
    dividends = {
        name: world.cash(name) - cash_before[name] for name in world.actors
    }
    dividends[world["consumer1"].name] += hits[0].license_fee  # paid out, not earned
    report.dividends = {name: delta for name, delta in sorted(dividends.items()) if delta}
    report.step(
        "8a-8b",
        "dividends distributed to economic and ownership holders",
        [f"{name}: +{delta}" for name, delta in report.dividends.items()],
    )
    _snapshot_balances(world, report, asset_id)

    report.state_root = ledger.state_root()
    return report


# --- economy simulation ----------------------------------------------------------


@dataclass
class EconomyReport:
    """Round-by-round dividend flow against configured maintenance costs."""

    rounds: list[dict] = field(default_factory=list)
    seed: int = 0
    owner_total: int = 0
    investor_total: int = 0
    fees_total: int = 0
    maintenance_total: int = 0
    cash_conserved: bool = True
    sustainable: bool = True

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "rounds": self.rounds,
            "owner_total": self.owner_total,
            "investor_total": self.investor_total,
            "fees_total": self.fees_total,
            "maintenance_total": self.maintenance_total,
            "cash_conserved": self.cash_conserved,
            "sustainable": self.sustainable,
        }

    def to_text(self) -> str:
        header = (
            f"{'round':>5} {'arrivals':>8} {'fees':>8} {'owner+':>8} "
            f"{'invest+':>8} {'cash':>12} {'conserved':>9}"
        )
        lines = ["ECONOMY SIMULATION", header, "-" * len(header)]
        for row in self.rounds:
            lines.append(
                f"{row['round']:>5} {row['arrivals']:>8} {row['fees']:>8} "
                f"{row['owner_dividend']:>8} {row['investor_dividend']:>8} "
                f"{row['total_cash']:>12} {str(row['cash_conserved']):>9}"
            )
        lines.append("-" * len(header))
        lines.append(
            f"owner total {self.owner_total} vs maintenance {self.maintenance_total} "
            f"-> {'sustainable' if self.sustainable else 'NOT sustainable'}; "
            f"investor royalties {self.investor_total}"
        )
        return "\n".join(lines)


def run_economy_simulation(
    seed: int,
    rounds: int,
    consumer_arrival_rate: float,
    maintenance_cost_per_round: int,
    license_fee: int = 100,
) -> EconomyReport:
    """Seeded consumer arrivals pay license fees round by round.

    Arrivals per round are deterministic in the integer part of the rate; the
    fractional part is a seeded coin flip. A sole owner holds the ownership
    supply and a sole investor the economic supply, so the gross 50/50 split
    is visible directly in the totals.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if consumer_arrival_rate < 0:
        raise ValueError("arrival rate must be >= 0")
    consumer_count = max(1, math.ceil(consumer_arrival_rate))
    # worst case one consumer absorbs every arrival of every round
    consumer_budget = rounds * (int(consumer_arrival_rate) + 1) * license_fee
    world = World(
        seed=seed,
        chain_id=f"bda-economy-{seed}",
        actors=[
            {"name": "owner1", "roles": ["owner"], "whitelisted": True},
            {"name": "tokenizer1", "roles": ["tokenizer"]},
            {"name": "investor1", "roles": ["investor"]},
        ]
        + [
            {"name": f"consumer{i}", "roles": ["consumer"], "cash": consumer_budget}
            for i in range(1, consumer_count + 1)
        ],
    )
    ledger = world.ledger
    record = BuildingDataRecord(
        building_ref="BLDG-ECON",
        category="utility_history",
        jurisdiction="SG",
        payload=b"monthly utility series",
        created_at=LOGICAL_EPOCH,
        updated_at=LOGICAL_EPOCH,
    )
    terms = ContractTerms(
        owner=world["owner1"].account_id,
        tokenizer=world["tokenizer1"].account_id,
        metadata={
            "building_ref": "BLDG-ECON",
            "category": "utility_history",
            "jurisdiction": "SG",
            "keywords": ["power", "usage"],
            "audited": False,
        },
        pointer={"content_hash": record.content_hash(), "locator": "gateway/local"},
        license_fee=license_fee,
        ownership_supply=1_000_000,
        economic_supply=1_000_000,
    ).signed_by_owner(world["owner1"].key).signed_by_tokenizer(world["tokenizer1"].key)
    asset_id = execute_contract(ledger, terms, world["tokenizer1"].key)
    # the investor takes the whole economic supply; the owner keeps ownership
    ledger.transact(
        world["owner1"].key,
        payloads.transfer_tokens(
            asset_id, "economic", world["owner1"].account_id, world["investor1"].account_id, 1_000_000
        ),
    )

    report = EconomyReport(seed=seed)
    arrival_rng = random.Random(seed ^ 0x5EED)
    whole, frac = int(consumer_arrival_rate), consumer_arrival_rate - int(consumer_arrival_rate)
    owner_id, investor_id = world["owner1"].account_id, world["investor1"].account_id
    baseline_cash = ledger.state.total_cash()
    owner_cum = investor_cum = fees_cum = 0
    for round_no in range(1, rounds + 1):
        arrivals = whole + (1 if frac > 0 and arrival_rng.random() < frac else 0)
        owner_before = ledger.state.cash_balance(owner_id)
        investor_before = ledger.state.cash_balance(investor_id)
        for _ in range(arrivals):
            consumer = world[f"consumer{arrival_rng.randint(1, consumer_count)}"]
            ledger.enqueue(consumer.key, payloads.pay_license(asset_id, license_fee))
        block = ledger.seal_block()
        # fees counted from what actually applied, never from intent
        fees = sum(
            tx["payload"]["amount"]
            for tx, outcome in zip(block["txs"], block["outcomes"])
            if outcome["status"] == "applied" and tx["payload"]["type"] == "pay_license"
        )
        owner_gain = ledger.state.cash_balance(owner_id) - owner_before
        investor_gain = ledger.state.cash_balance(investor_id) - investor_before
        owner_cum += owner_gain
        investor_cum += investor_gain
        fees_cum += fees
        conserved = ledger.state.total_cash() == baseline_cash
        report.cash_conserved = report.cash_conserved and conserved
        report.rounds.append(
            {
                "round": round_no,
                "arrivals": arrivals,
                "fees": fees,
                "owner_dividend": owner_gain,
                "investor_dividend": investor_gain,
                "owner_cumulative": owner_cum,
                "investor_cumulative": investor_cum,
                "total_cash": ledger.state.total_cash(),
                "cash_conserved": conserved,
            }
        )
    report.owner_total = owner_cum
    report.investor_total = investor_cum
    report.fees_total = fees_cum
    report.maintenance_total = maintenance_cost_per_round * rounds
    report.sustainable = owner_cum >= report.maintenance_total
    return report


# --- chain audit -------------------------------------------------------------------


def audit_findings(ledger: Ledger, gateway: DatastoreGateway | None = None) -> list[str]:
    """Chain verification plus audited-flag and pointer-integrity checks."""
    findings = []
    chain_report = ledger.verify_chain()
    if not chain_report.ok:
        findings.append(chain_report.summary())
    findings.extend(audited_flag_findings(ledger.state))
    if gateway is not None:
        findings.extend(gateway.pointer_integrity_findings())
    return findings
