"""Command-line driver for the building-data-asset ecosystem.

Keeps a data directory holding the block store, a named keystore, the
datastore gateway's content files, and scenario reports. Every state change
goes through signed transactions sealed into the hash chain.
"""

from __future__ import annotations

import json
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

import click
import yaml

from bda import payloads
from bda.assets import verify_payment
from bda.bridge import ContractTerms, execute_contract
from bda.certifiers import certify_record, verify_record
from bda.crypto import KeyPair
from bda.dexbook import open_orders
from bda.errors import LedgerError
from bda.gateway import DatastoreGateway, sign_request
from bda.ledger import Ledger, make_genesis, verify_chain_files
from bda.records import BuildingDataRecord, parse_record
from bda.scenario import (
    BootstrapConfig,
    ScenarioAbort,
    audit_findings,
    run_bootstrap_scenario,
    run_economy_simulation,
)
from bda.search import SearchIndex


class Workspace:
    """The CLI's view of one data directory."""

    def __init__(self, root: Path):
        self.root = root
        self.keys_dir = root / "keys"
        self._ledger: Ledger | None = None

    @property
    def ledger(self) -> Ledger:
        if self._ledger is None:
            if not (self.root / "blocks").is_dir():
                raise click.ClickException(
                    f"no chain at {self.root}; run 'bda init' first"
                )
            self._ledger = Ledger.open(self.root)
        return self._ledger

    @property
    def gateway(self) -> DatastoreGateway:
        return DatastoreGateway(self.ledger, self.key("gateway"), root=self.root / "store")

    @property
    def index(self) -> SearchIndex:
        index = SearchIndex(self.ledger)
        index.sync_from_ledger()
        return index

    def key(self, name: str) -> KeyPair:
        path = self.keys_dir / f"{name}.key"
        if not path.is_file():
            raise click.ClickException(f"no key named {name!r} in {self.keys_dir}")
        return KeyPair.from_seed(bytes.fromhex(path.read_text().strip()))

    def new_key(self, name: str) -> KeyPair:
        self.keys_dir.mkdir(parents=True, exist_ok=True)
        path = self.keys_dir / f"{name}.key"
        if path.exists():
            raise click.ClickException(f"key {name!r} already exists")
        key = KeyPair.generate()
        path.write_text(key.private_bytes.hex() + "\n")
        return key

    def account_id(self, name: str) -> str:
        return self.key(name).account_id.hex()


pass_workspace = click.make_pass_decorator(Workspace)


def _run(workspace: Workspace, signer: str, payload: dict) -> str:
    try:
        txid, _ = workspace.ledger.transact(workspace.key(signer), payload)
        return txid
    except LedgerError as exc:
        raise click.ClickException(exc.reason()) from exc


@click.group()
@click.option(
    "--data-dir",
    envvar="BDA_DATA_DIR",
    default="bda-data",
    show_default=True,
    type=click.Path(path_type=Path),
    help="Workspace holding the chain, keys, and datastore.",
)
@click.pass_context
def main(ctx: click.Context, data_dir: Path) -> None:
    """Tokenized building-data-asset ecosystem, desk scale."""
    ctx.obj = Workspace(data_dir)


@main.command()
@click.option("--chain-id", default="bda-local", show_default=True)
@click.option("--faucet/--no-faucet", default=True, show_default=True)
@pass_workspace
def init(workspace: Workspace, chain_id: str, faucet: bool) -> None:
    """Create a fresh chain with admin and gateway service accounts."""
    if (workspace.root / "blocks").exists():
        raise click.ClickException(f"chain already initialized at {workspace.root}")
    admin = workspace.new_key("admin")
    gateway = workspace.new_key("gateway")
    genesis = make_genesis(
        chain_id,
        [
            {"public_key": admin.public_bytes.hex(), "roles": ["admin"], "whitelisted": True},
            {"public_key": gateway.public_bytes.hex(), "roles": ["admin"]},
        ],
        faucet_enabled=faucet,
    )
    Ledger.create(genesis, data_dir=workspace.root)
    click.echo(f"chain {chain_id} initialized at {workspace.root}")
    click.echo(f"admin account:   {admin.account_id.hex()}")
    click.echo(f"gateway account: {gateway.account_id.hex()}")


# --- accounts ------------------------------------------------------------------


@main.group()
def account() -> None:
    """Create, fund, and inspect accounts."""


@account.command("new")
@click.option("--name", required=True)
@click.option("--roles", required=True, help="Comma-separated roles.")
@click.option("--whitelist", is_flag=True, help="Eligible to hold ownership tokens.")
@click.option("--sponsor", default="admin", show_default=True)
@pass_workspace
def account_new(workspace: Workspace, name: str, roles: str, whitelist: bool, sponsor: str) -> None:
    key = workspace.new_key(name)
    payload = payloads.register_account(
        key.public_bytes.hex(), [r.strip() for r in roles.split(",") if r.strip()], whitelist
    )
    _run(workspace, sponsor, payload)
    click.echo(f"account {name}: {key.account_id.hex()}")


@account.command("fund")
@click.option("--name", required=True)
@click.option("--amount", required=True, type=int)
@pass_workspace
def account_fund(workspace: Workspace, name: str, amount: int) -> None:
    _run(workspace, "admin", payloads.faucet(workspace.account_id(name), amount))
    click.echo(f"{name} cash: {workspace.ledger.state.cash_balance(workspace.account_id(name))}")


@account.command("show")
@click.option("--name", required=True)
@pass_workspace
def account_show(workspace: Workspace, name: str) -> None:
    account_id = workspace.account_id(name)
    entry = workspace.ledger.state.require_account(account_id)
    click.echo(f"account_id:  {account_id}")
    click.echo(f"roles:       {', '.join(entry['roles'])}")
    click.echo(f"whitelisted: {entry['whitelisted']}")
    click.echo(f"nonce:       {entry['nonce']}")
    click.echo(f"cash:        {workspace.ledger.state.cash_balance(account_id)}")


# --- records ---------------------------------------------------------------------


@main.group()
def record() -> None:
    """Build and store prescribed-format building data records."""


@record.command("build")
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--building-ref", required=True)
@click.option("--category", required=True, type=click.Choice(sorted(payloads.CATEGORIES)))
@click.option("--jurisdiction", required=True)
@click.option("--quantity", type=int, default=None)
@click.option("--units", default=None)
@click.option("--payload-file", type=click.Path(path_type=Path), default=None)
@click.option("--payload-text", default=None)
@click.option("--timestamp", type=int, default=0, show_default=True)
def record_build(
    out: Path,
    building_ref: str,
    category: str,
    jurisdiction: str,
    quantity: int | None,
    units: str | None,
    payload_file: Path | None,
    payload_text: str | None,
    timestamp: int,
) -> None:
    if payload_file is not None:
        payload = payload_file.read_bytes()
    elif payload_text is not None:
        payload = payload_text.encode()
    else:
        raise click.ClickException("provide --payload-file or --payload-text")
    rec = BuildingDataRecord(
        building_ref=building_ref,
        category=category,
        jurisdiction=jurisdiction,
        payload=payload,
        created_at=timestamp,
        updated_at=timestamp,
        quantity=quantity,
        units=units,
    )
    out.write_bytes(rec.to_bytes())
    click.echo(f"record written; content hash {rec.content_hash()}")


@record.command("store")
@click.option("--record", "record_path", required=True, type=click.Path(path_type=Path))
@click.option("--as", "as_name", required=True, help="Uploading owner key name.")
@click.option("--asset", default=None, help="Asset id; omit for a pre-mint upload.")
@pass_workspace
def record_store(workspace: Workspace, record_path: Path, as_name: str, asset: str | None) -> None:
    try:
        content_hash = workspace.gateway.store_record(
            workspace.account_id(as_name), record_path.read_bytes(), asset
        )
    except LedgerError as exc:
        raise click.ClickException(exc.reason()) from exc
    click.echo(f"stored; content hash {content_hash}")


# --- tokenization ------------------------------------------------------------------


@main.group()
def terms() -> None:
    """Draft and sign tokenization contract terms."""


@terms.command("draft")
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--owner", required=True, help="Owner key name.")
@click.option("--tokenizer", required=True, help="Tokenizer key name.")
@click.option("--record", "record_path", required=True, type=click.Path(path_type=Path))
@click.option("--locator", default="gateway/local", show_default=True)
@click.option("--keywords", required=True, help="Comma-separated search keywords.")
@click.option("--license-fee", required=True, type=int)
@click.option("--ownership-supply", default=1_000_000, show_default=True, type=int)
@click.option("--economic-supply", default=1_000_000, show_default=True, type=int)
@pass_workspace
def terms_draft(
    workspace: Workspace,
    out: Path,
    owner: str,
    tokenizer: str,
    record_path: Path,
    locator: str,
    keywords: str,
    license_fee: int,
    ownership_supply: int,
    economic_supply: int,
) -> None:
    rec = parse_record(record_path.read_bytes())
    draft = ContractTerms(
        owner=workspace.account_id(owner),
        tokenizer=workspace.account_id(tokenizer),
        metadata={
            "building_ref": rec.building_ref,
            "category": rec.category,
            "jurisdiction": rec.jurisdiction,
            "keywords": [k.strip() for k in keywords.split(",") if k.strip()],
            "audited": False,
        },
        pointer={"content_hash": rec.content_hash(), "locator": locator},
        license_fee=license_fee,
        ownership_supply=ownership_supply,
        economic_supply=economic_supply,
    )
    out.write_bytes(draft.to_bytes())
    click.echo(draft.render_text())


@terms.command("sign")
@click.option("--terms", "terms_path", required=True, type=click.Path(path_type=Path))
@click.option("--as", "as_name", required=True)
@pass_workspace
def terms_sign(workspace: Workspace, terms_path: Path, as_name: str) -> None:
    contract = ContractTerms.from_bytes(terms_path.read_bytes())
    key = workspace.key(as_name)
    account_id = key.account_id.hex()
    if account_id == contract.owner:
        contract = contract.signed_by_owner(key)
    elif account_id == contract.tokenizer:
        contract = contract.signed_by_tokenizer(key)
    else:
        raise click.ClickException(f"{as_name} is neither party to these terms")
    terms_path.write_bytes(contract.to_bytes())
    click.echo(contract.render_text())


@main.command()
@click.option("--terms", "terms_path", required=True, type=click.Path(path_type=Path))
@click.option("--as", "as_name", default="", help="Tokenizer key name; defaults to the contracted tokenizer key.")
@pass_workspace
def tokenize(workspace: Workspace, terms_path: Path, as_name: str) -> None:
    """Execute dual-signed contract terms: mint the asset to its owner."""
    contract = ContractTerms.from_bytes(terms_path.read_bytes())
    tokenizer_key = None
    if as_name:
        tokenizer_key = workspace.key(as_name)
    else:
        for path in workspace.keys_dir.glob("*.key"):
            key = workspace.key(path.stem)
            if key.account_id.hex() == contract.tokenizer:
                tokenizer_key = key
                break
        if tokenizer_key is None:
            raise click.ClickException("no local key matches the contracted tokenizer")
    try:
        asset_id = execute_contract(workspace.ledger, contract, tokenizer_key)
    except LedgerError as exc:
        raise click.ClickException(exc.reason()) from exc
    workspace.gateway.sync()
    click.echo(f"asset minted: {asset_id}")


# --- exchange -----------------------------------------------------------------------


@main.group()
def dex() -> None:
    """Escrow exchange: list, fill, and cancel token orders."""


@dex.command("list")
@click.option("--asset", default=None)
@pass_workspace
def dex_list(workspace: Workspace, asset: str | None) -> None:
    orders = open_orders(workspace.ledger.state, asset)
    if not orders:
        click.echo("no open orders")
        return
    for order_id, order in orders:
        click.echo(
            f"{order_id}  {order['kind']:<9} remaining={order['remaining']} "
            f"@ {order['unit_price']}  asset={order['asset_id'][:16]}… seller={order['seller'][:16]}…"
        )


@dex.command("place")
@click.option("--asset", required=True)
@click.option("--kind", required=True, type=click.Choice(sorted(payloads.TOKEN_KINDS)))
@click.option("--amount", required=True, type=int)
@click.option("--price", required=True, type=int)
@click.option("--as", "as_name", required=True)
@pass_workspace
def dex_place(workspace: Workspace, asset: str, kind: str, amount: int, price: int, as_name: str) -> None:
    order_id = _run(workspace, as_name, payloads.place_order(asset, kind, amount, price))
    click.echo(f"order placed: {order_id}")


@dex.command("fill")
@click.option("--order", "order_id", required=True)
@click.option("--amount", required=True, type=int)
@click.option("--as", "as_name", required=True)
@pass_workspace
def dex_fill(workspace: Workspace, order_id: str, amount: int, as_name: str) -> None:
    _run(workspace, as_name, payloads.fill_order(order_id, amount))
    order = workspace.ledger.state.data["orders"][order_id]
    click.echo(f"filled {amount}; order remaining {order['remaining']} ({order['status']})")


@dex.command("cancel")
@click.option("--order", "order_id", required=True)
@click.option("--as", "as_name", required=True)
@pass_workspace
def dex_cancel(workspace: Workspace, order_id: str, as_name: str) -> None:
    _run(workspace, as_name, payloads.cancel_order(order_id))
    click.echo("order cancelled; escrow returned")


# --- search, payment, retrieval ---------------------------------------------------


@main.command()
@click.argument("terms_", metavar="TERMS...", nargs=-1)
@click.option("--category", default=None, type=click.Choice(sorted(payloads.CATEGORIES)))
@click.option("--audited", is_flag=True, help="Only assets whose record is certified.")
@click.option("--jurisdiction", default=None)
@pass_workspace
def search(workspace: Workspace, terms_: tuple[str, ...], category: str | None, audited: bool, jurisdiction: str | None) -> None:
    """Query the metadata index: returns asset ids, fees, audit flags."""
    hits = workspace.index.query(
        list(terms_), category=category, audited_only=audited, jurisdiction=jurisdiction
    )
    if not hits:
        click.echo("no matching assets")
        return
    for hit in hits:
        click.echo(f"{hit.asset_id}  fee={hit.license_fee}  audited={hit.audited}")


@main.command()
@click.option("--asset", required=True)
@click.option("--as", "as_name", required=True)
@click.option("--amount", type=int, default=None, help="Defaults to the current license fee.")
@pass_workspace
def pay(workspace: Workspace, asset: str, as_name: str, amount: int | None) -> None:
    """Pay an asset's license fee; prints the payment id for retrieval."""
    if amount is None:
        fee = workspace.ledger.state.asset(asset)
        if fee is None:
            raise click.ClickException(f"unknown asset {asset}")
        amount = fee["license_fee"]
    payment_id = _run(workspace, as_name, payloads.pay_license(asset, amount))
    click.echo(f"payment id: {payment_id}")


@main.command()
@click.option("--asset", default=None)
@click.option("--payment", default=None, help="Unconsumed payment id (first request).")
@click.option("--license", "license_id", default=None, help="License id (re-reads).")
@click.option("--as", "as_name", required=True)
@click.option("--fields", default=None, help="Comma-separated field selectors.")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Write payload bytes here.")
@pass_workspace
def get(
    workspace: Workspace,
    asset: str | None,
    payment: str | None,
    license_id: str | None,
    as_name: str,
    fields: str | None,
    out: Path | None,
) -> None:
    """Retrieve data: against a payment (issues a license) or an existing license."""
    consumer = workspace.account_id(as_name)
    key = workspace.key(as_name)
    gateway = workspace.gateway
    query = [f.strip() for f in fields.split(",")] if fields else None
    try:
        if license_id is not None:
            request = {"action": "read", "consumer": consumer, "license_id": license_id}
            view = gateway.read_with_license(consumer, license_id, sign_request(request, key))
        else:
            if asset is None or payment is None:
                raise click.ClickException("provide --asset and --payment, or --license")
            if payment == "auto":
                unconsumed = verify_payment(workspace.ledger.state, asset, consumer)
                if not unconsumed:
                    raise click.ClickException("no unconsumed payments for this asset")
                payment = unconsumed[0]
            request = {
                "action": "request",
                "consumer": consumer,
                "asset_id": asset,
                "payment_id": payment,
                "query": query,
            }
            view, receipt = gateway.request_data(
                consumer, asset, payment, sign_request(request, key), query
            )
            click.echo(f"license: {receipt.license_id}")
    except LedgerError as exc:
        raise click.ClickException(exc.reason()) from exc
    for field, value in view.items():
        if field == "payload":
            continue
        click.echo(f"{field}: {value}")
    if "payload" in view:
        if out is not None:
            out.write_bytes(view["payload"])
            click.echo(f"payload written to {out}")
        else:
            click.echo(f"payload: {view['payload']!r}")


# --- certification -------------------------------------------------------------------


@main.command()
@click.option("--record", "record_path", required=True, type=click.Path(path_type=Path))
@click.option("--asset", required=True)
@click.option("--as", "as_name", required=True, help="Certifier key name.")
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.option("--attach-as", default=None, help="Owner key name; files the certification on-ledger.")
@click.option("--timestamp", type=int, default=0, show_default=True)
@pass_workspace
def certify(
    workspace: Workspace,
    record_path: Path,
    asset: str,
    as_name: str,
    out: Path | None,
    attach_as: str | None,
    timestamp: int,
) -> None:
    """Sign a record as an accredited expert; optionally attach it on-ledger."""
    try:
        certification = certify_record(
            workspace.ledger.state,
            workspace.key(as_name),
            record_path.read_bytes(),
            asset,
            timestamp,
        )
    except LedgerError as exc:
        raise click.ClickException(exc.reason()) from exc
    if out is not None:
        out.write_bytes(certification.to_bytes())
        click.echo(f"certification written to {out}")
    if attach_as is not None:
        _run(workspace, attach_as, payloads.attach_certification(asset, certification.to_dict()))
        click.echo("certification attached on-ledger")
    verdict = verify_record(workspace.ledger.state, record_path.read_bytes(), certification)
    click.echo(f"verification: {verdict}")


@main.group()
def certifier() -> None:
    """Admin maintenance of the accredited-expert key store."""


@certifier.command("register")
@click.option("--name", required=True, help="Certifier key name.")
@click.option("--tag", required=True, help="Accreditation tag.")
@pass_workspace
def certifier_register(workspace: Workspace, name: str, tag: str) -> None:
    _run(workspace, "admin", payloads.register_certifier(workspace.account_id(name), tag))
    click.echo(f"certifier {name} active")


@certifier.command("revoke")
@click.option("--name", required=True)
@pass_workspace
def certifier_revoke(workspace: Workspace, name: str) -> None:
    _run(workspace, "admin", payloads.revoke_certifier(workspace.account_id(name)))
    click.echo(f"certifier {name} revoked")


# --- governance -----------------------------------------------------------------------


def _parse_parameter(action: str, parameter: str):
    if action == "set_license_fee":
        return int(parameter)
    if action in ("retire_asset", "set_audited"):
        return parameter.lower() in ("true", "yes", "1")
    return json.loads(parameter)


@main.command()
@click.option("--asset", required=True)
@click.option("--action", required=True, type=click.Choice(sorted(payloads.PROPOSAL_ACTIONS)))
@click.option("--parameter", required=True, help="Fee, boolean, or pointer JSON.")
@click.option("--as", "as_name", required=True)
@pass_workspace
def vote(workspace: Workspace, asset: str, action: str, parameter: str, as_name: str) -> None:
    """Propose-and-vote; executes immediately once weight exceeds half the supply."""
    value = _parse_parameter(action, parameter)
    _run(workspace, as_name, payloads.vote(asset, action, value))
    entry = workspace.ledger.state.require_asset(asset)
    open_count = len(entry["proposals"])
    click.echo(f"vote recorded; open proposals on asset: {open_count}")


@main.command()
@click.option("--asset", required=True)
@click.option("--historic", is_flag=True, help="Retain the data for historic value.")
@click.option("--as", "as_name", required=True)
@pass_workspace
def retire(workspace: Workspace, asset: str, historic: bool, as_name: str) -> None:
    """Vote to retire the asset; deletes the payload unless retained as historic."""
    _run(workspace, as_name, payloads.vote(asset, "retire_asset", historic))
    status = workspace.ledger.state.require_asset(asset)["status"]
    if status == "retired":
        workspace.gateway.sync()
        click.echo("asset retired; payload deleted, tombstone kept")
    elif status == "retained_historic":
        click.echo("asset retained as historic; payload kept")
    else:
        click.echo("vote recorded; majority not yet reached")


# --- scenarios and audit ----------------------------------------------------------------


@main.group()
def scenario() -> None:
    """Deterministic end-to-end scenarios and simulations."""


def _write_reports(report, report_dir: Path | None) -> None:
    if report_dir is None:
        return
    report_dir.mkdir(parents=True, exist_ok=True)
    (report_dir / "report.txt").write_text(report.to_text() + "\n")
    (report_dir / "summary.json").write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
    click.echo(f"reports written to {report_dir}")


@scenario.command("run")
@click.argument("file", type=click.Path(path_type=Path, exists=True))
@click.option("--report-dir", type=click.Path(path_type=Path), default=None)
def scenario_run(file: Path, report_dir: Path | None) -> None:
    """Run a scenario file (kind: bootstrap or economy)."""
    spec = yaml.safe_load(file.read_text()) or {}
    kind = spec.pop("kind", "bootstrap")
    try:
        if kind == "bootstrap":
            known = {f.name for f in dataclass_fields(BootstrapConfig)}
            unknown = set(spec) - known
            if unknown:
                raise click.ClickException(f"unknown bootstrap fields: {sorted(unknown)}")
            report = run_bootstrap_scenario(BootstrapConfig(**spec))
        elif kind == "economy":
            report = run_economy_simulation(
                seed=int(spec.get("seed", 0)),
                rounds=int(spec.get("rounds", 10)),
                consumer_arrival_rate=float(spec.get("consumer_arrival_rate", 1.0)),
                maintenance_cost_per_round=int(spec.get("maintenance_cost_per_round", 0)),
                license_fee=int(spec.get("license_fee", 100)),
            )
        else:
            raise click.ClickException(f"unknown scenario kind {kind!r}")
    except ScenarioAbort as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(report.to_text())
    _write_reports(report, report_dir)


@scenario.command("bootstrap")
@click.option("--report-dir", type=click.Path(path_type=Path), default=None)
def scenario_bootstrap(report_dir: Path | None) -> None:
    """Run the default end-to-end bootstrap flow."""
    try:
        report = run_bootstrap_scenario()
    except ScenarioAbort as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(report.to_text())
    _write_reports(report, report_dir)


@scenario.command("economy")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--rounds", default=10, show_default=True, type=int)
@click.option("--rate", default=1.0, show_default=True, type=float)
@click.option("--maintenance", default=0, show_default=True, type=int)
@click.option("--fee", default=100, show_default=True, type=int)
@click.option("--report-dir", type=click.Path(path_type=Path), default=None)
def scenario_economy(seed: int, rounds: int, rate: float, maintenance: int, fee: int, report_dir: Path | None) -> None:
    """Run the multi-round incentive simulation."""
    report = run_economy_simulation(seed, rounds, rate, maintenance, license_fee=fee)
    click.echo(report.to_text())
    _write_reports(report, report_dir)


@main.command()
@pass_workspace
def audit(workspace: Workspace) -> None:
    """Verify the chain, audited flags, and pointer integrity; nonzero exit on findings."""
    blocks_dir = workspace.root / "blocks"
    if not blocks_dir.is_dir():
        raise click.ClickException(f"no chain at {workspace.root}")
    chain_report = verify_chain_files(blocks_dir)
    findings: list[str] = []
    if not chain_report.ok:
        findings.append(chain_report.summary())
        click.echo(chain_report.summary())
    else:
        click.echo(chain_report.summary())
        findings.extend(audit_findings(workspace.ledger, workspace.gateway))
        for finding in findings:
            click.echo(f"FINDING: {finding}")
    if findings:
        sys.exit(1)
    click.echo("audit clean")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8350, show_default=True, type=int)
@pass_workspace
def serve(workspace: Workspace, host: str, port: int) -> None:
    """Serve the search and datastore endpoints over HTTP."""
    import uvicorn

    from bda.http_api import create_app

    app = create_app(workspace.index, workspace.gateway)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
