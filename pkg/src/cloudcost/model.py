"""Deployment-model schema: nodes, artifacts, communication paths, groups.

Models are read from UTF-8 JSON documents (extension ``.cloudmodel.json``,
``"schema": 1``) and are immutable after parsing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional

from .patterns import Pattern, PatternSyntaxError, UsageSpec, parse_patterns

__all__ = [
    "NodeKind",
    "PurchaseMode",
    "ServerSpecs",
    "Node",
    "Artifact",
    "CommunicationPath",
    "Group",
    "ProviderBinding",
    "DeploymentModel",
    "Violation",
    "ModelError",
    "ModelSyntaxError",
    "parse_model",
    "parse_model_document",
    "load_model",
    "validate",
    "serialize_model",
]

SCHEMA_VERSION = 1


class NodeKind(str, Enum):
    VIRTUAL_MACHINE = "virtual-machine"
    VIRTUAL_STORAGE = "virtual-storage"
    DATABASE = "database"
    REMOTE_NODE = "remote-node"


class PurchaseMode(str, Enum):
    ON_DEMAND = "on-demand"
    RESERVED = "reserved"


class ModelError(ValueError):
    """Malformed or invalid deployment model document."""


class ModelSyntaxError(ModelError):
    """Document is not well-formed; carries a line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class ServerSpecs:
    cpu_ghz: float
    ram_gb: float

    def __post_init__(self) -> None:
        if self.cpu_ghz <= 0 or self.ram_gb <= 0:
            raise ModelError("server specs must be positive")


ZERO_USAGE = UsageSpec()


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    os: Optional[str] = None
    server_type: Optional[str] = None
    specs: Optional[ServerSpecs] = None
    storage_type: Optional[str] = None
    size_gb: UsageSpec = ZERO_USAGE
    instance_count: UsageSpec = ZERO_USAGE
    io_in_requests_per_month: UsageSpec = ZERO_USAGE
    io_out_requests_per_month: UsageSpec = ZERO_USAGE

    @property
    def billable(self) -> bool:
        return self.kind != NodeKind.REMOTE_NODE

    @property
    def sku(self) -> Optional[str]:
        """Price-list SKU used for this node's lookups."""
        if self.kind == NodeKind.VIRTUAL_STORAGE:
            return self.storage_type
        return self.server_type


@dataclass(frozen=True)
class Artifact:
    id: str
    kind: str  # "application" | "data"
    deployed_on: str


@dataclass(frozen=True)
class CommunicationPath:
    id: str
    from_node: str
    to_node: str
    data_in_gb_per_month: UsageSpec = ZERO_USAGE
    data_out_gb_per_month: UsageSpec = ZERO_USAGE


@dataclass(frozen=True)
class Group:
    id: str
    label: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class ProviderBinding:
    provider: str
    region: str
    purchase_mode: PurchaseMode = PurchaseMode.ON_DEMAND
    term_months: Optional[int] = None


@dataclass(frozen=True)
class DeploymentModel:
    name: str
    nodes: tuple[Node, ...] = ()
    artifacts: tuple[Artifact, ...] = ()
    paths: tuple[CommunicationPath, ...] = ()
    groups: tuple[Group, ...] = ()
    provider_bindings: Mapping[str, ProviderBinding] = field(default_factory=dict)

    def node_by_id(self, node_id: str) -> Optional[Node]:
        for n in self.nodes:
            if n.id == node_id:
                return n
        return None

    def group_of(self, member_id: str) -> Optional[Group]:
        for g in self.groups:
            if member_id in g.members:
                return g
        return None


@dataclass(frozen=True)
class Violation:
    element: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.element}: {self.rule}: {self.message}"


# --- document parsing --------------------------------------------------------

_NODE_COMMON_KEYS = {"id", "kind"}
_NODE_KEYS_BY_KIND = {
    NodeKind.VIRTUAL_MACHINE: {"os", "server_type", "specs", "instance_count",
                               "io_in_requests_per_month", "io_out_requests_per_month"},
    NodeKind.VIRTUAL_STORAGE: {"storage_type", "size_gb",
                               "io_in_requests_per_month", "io_out_requests_per_month"},
    NodeKind.DATABASE: {"server_type", "size_gb",
                        "io_in_requests_per_month", "io_out_requests_per_month"},
    NodeKind.REMOTE_NODE: set(),
}


def parse_model(document: str) -> DeploymentModel:
    """Parse a model document and reject it unless all invariants hold."""
    model = parse_model_document(document)
    violations = validate(model)
    if violations:
        raise ModelError("; ".join(str(v) for v in violations))
    return model


def parse_model_document(document: str) -> DeploymentModel:
    """Structural parse only: shape, kinds, duplicate ids, pattern syntax.

    Referential invariants are left to validate(), so callers such as the
    validation endpoint can report them as data instead of failures.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise ModelSyntaxError(e.msg, e.lineno, e.colno) from None
    return model_from_obj(doc)


def load_model(path: str) -> DeploymentModel:
    with open(path, encoding="utf-8") as f:
        return parse_model(f.read())


def model_from_obj(doc: Any) -> DeploymentModel:
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ModelError(f'model document must declare "schema": {SCHEMA_VERSION}')
    _check_keys(doc, {"schema", "name", "nodes", "artifacts", "paths", "groups",
                      "provider_bindings"}, "model")
    name = _require_str(doc, "name", "model")

    nodes = []
    seen_nodes = set()
    for obj in _require_list(doc, "nodes"):
        node = _parse_node(obj)
        if node.id in seen_nodes:
            raise ModelError(f"duplicate node id {node.id!r}")
        seen_nodes.add(node.id)
        nodes.append(node)

    artifacts = []
    seen_artifacts = set()
    for obj in _require_list(doc, "artifacts"):
        _check_keys(obj, {"id", "kind", "deployed_on"}, "artifact")
        art = Artifact(id=_require_str(obj, "id", "artifact"),
                       kind=_require_str(obj, "kind", "artifact"),
                       deployed_on=_require_str(obj, "deployed_on", "artifact"))
        if art.kind not in ("application", "data"):
            raise ModelError(f"unknown artifact kind {art.kind!r}")
        if art.id in seen_artifacts:
            raise ModelError(f"duplicate artifact id {art.id!r}")
        seen_artifacts.add(art.id)
        artifacts.append(art)

    paths = []
    for obj in _require_list(doc, "paths"):
        _check_keys(obj, {"id", "from", "to", "data_in_gb_per_month",
                          "data_out_gb_per_month"}, "path")
        paths.append(CommunicationPath(
            id=_require_str(obj, "id", "path"),
            from_node=_require_str(obj, "from", "path"),
            to_node=_require_str(obj, "to", "path"),
            data_in_gb_per_month=_parse_usage(obj.get("data_in_gb_per_month"), "path"),
            data_out_gb_per_month=_parse_usage(obj.get("data_out_gb_per_month"), "path"),
        ))

    groups = []
    for obj in _require_list(doc, "groups"):
        _check_keys(obj, {"id", "label", "members"}, "group")
        members = obj.get("members", [])
        if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
            raise ModelError("group members must be a list of ids")
        groups.append(Group(id=_require_str(obj, "id", "group"),
                            label=str(obj.get("label", obj["id"])),
                            members=tuple(members)))

    bindings = {}
    bindings_obj = doc.get("provider_bindings", {})
    if not isinstance(bindings_obj, dict):
        raise ModelError("provider_bindings must be an object keyed by node id")
    for node_id, obj in bindings_obj.items():
        _check_keys(obj, {"provider", "region", "purchase_mode", "term_months"}, "binding")
        mode_text = obj.get("purchase_mode", "on-demand")
        try:
            mode = PurchaseMode(mode_text)
        except ValueError:
            raise ModelError(f"unknown purchase mode {mode_text!r}") from None
        term = obj.get("term_months")
        if term is not None and (not isinstance(term, int) or term <= 0):
            raise ModelError(f"term_months must be a positive integer, got {term!r}")
        bindings[node_id] = ProviderBinding(
            provider=_require_str(obj, "provider", "binding"),
            region=_require_str(obj, "region", "binding"),
            purchase_mode=mode,
            term_months=term,
        )

    return DeploymentModel(name=name, nodes=tuple(nodes), artifacts=tuple(artifacts),
                           paths=tuple(paths), groups=tuple(groups),
                           provider_bindings=bindings)


def _parse_node(obj: Any) -> Node:
    if not isinstance(obj, dict):
        raise ModelError("node must be a JSON object")
    node_id = _require_str(obj, "id", "node")
    kind_text = _require_str(obj, "kind", f"node {node_id!r}")
    try:
        kind = NodeKind(kind_text)
    except ValueError:
        raise ModelError(f"unknown node kind {kind_text!r} on node {node_id!r}") from None
    allowed = _NODE_COMMON_KEYS | _NODE_KEYS_BY_KIND[kind]
    extra = set(obj) - allowed
    if extra:
        raise ModelError(
            f"field {sorted(extra)[0]!r} not allowed for kind {kind.value} (node {node_id!r})")
    specs = None
    if "specs" in obj:
        spec_obj = obj["specs"]
        _check_keys(spec_obj, {"cpu_ghz", "ram_gb"}, "specs")
        try:
            specs = ServerSpecs(cpu_ghz=float(spec_obj["cpu_ghz"]),
                                ram_gb=float(spec_obj["ram_gb"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ModelError(f"bad server specs on node {node_id!r}: {e}") from None
    try:
        return Node(
            id=node_id,
            kind=kind,
            os=obj.get("os"),
            server_type=obj.get("server_type"),
            specs=specs,
            storage_type=obj.get("storage_type"),
            size_gb=_parse_usage(obj.get("size_gb"), node_id),
            instance_count=_parse_usage(obj.get("instance_count"), node_id),
            io_in_requests_per_month=_parse_usage(obj.get("io_in_requests_per_month"), node_id),
            io_out_requests_per_month=_parse_usage(obj.get("io_out_requests_per_month"), node_id),
        )
    except ValueError as e:
        raise ModelError(f"node {node_id!r}: {e}") from None


def _parse_usage(obj: Any, owner: str) -> UsageSpec:
    if obj is None:
        return ZERO_USAGE
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return UsageSpec(baseline=float(obj))
    if not isinstance(obj, dict):
        raise ModelError(f"usage of {owner!r} must be a number or an object")
    _check_keys(obj, {"baseline", "patterns"}, f"usage of {owner!r}")
    baseline = obj.get("baseline", 0)
    if isinstance(baseline, bool) or not isinstance(baseline, (int, float)):
        raise ModelError(f"usage baseline of {owner!r} must be a number")
    patterns: tuple[Pattern, ...] = ()
    text = obj.get("patterns", "")
    if text:
        if not isinstance(text, str):
            raise ModelError(f"usage patterns of {owner!r} must be a string")
        try:
            patterns = tuple(parse_patterns(text))
        except PatternSyntaxError as e:
            raise ModelError(f"bad pattern on {owner!r}: {e}") from None
    return UsageSpec(baseline=float(baseline), patterns=patterns)


def _check_keys(obj: Any, allowed: set, what: str) -> None:
    if not isinstance(obj, dict):
        raise ModelError(f"{what} must be a JSON object")
    extra = set(obj) - allowed
    if extra:
        raise ModelError(f"unknown field {sorted(extra)[0]!r} in {what}")


def _require_str(obj: dict, key: str, what: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise ModelError(f"{what} requires a non-empty string field {key!r}")
    return value


def _require_list(doc: dict, key: str) -> list:
    value = doc.get(key, [])
    if not isinstance(value, list):
        raise ModelError(f"{key!r} must be a list")
    return value


# --- validation ---------------------------------------------------------------

_DEPLOY_TARGETS = {
    "application": {NodeKind.VIRTUAL_MACHINE},
    "data": {NodeKind.VIRTUAL_STORAGE, NodeKind.DATABASE},
}


def validate(model: DeploymentModel) -> list[Violation]:
    """Check every structural invariant; empty list means the model is sound."""
    violations: list[Violation] = []
    node_ids = {}
    for n in model.nodes:
        if n.id in node_ids:
            violations.append(Violation(n.id, "duplicate-id", "node id used more than once"))
        node_ids[n.id] = n
    artifact_ids = set()
    for a in model.artifacts:
        if a.id in artifact_ids:
            violations.append(Violation(a.id, "duplicate-id", "artifact id used more than once"))
        artifact_ids.add(a.id)

    for n in model.nodes:
        violations.extend(_validate_node(n))

    for a in model.artifacts:
        target = node_ids.get(a.deployed_on)
        if target is None:
            violations.append(Violation(
                a.id, "dangling-deployment", f"deployed_on references unknown node {a.deployed_on!r}"))
        elif target.kind not in _DEPLOY_TARGETS[a.kind]:
            violations.append(Violation(
                a.id, "incompatible-deployment-target",
                f"incompatible deployment target: {a.kind} cannot deploy on {target.kind.value}"))

    for p in model.paths:
        if p.from_node == p.to_node:
            violations.append(Violation(p.id, "self-loop", "path endpoints must differ"))
        for end in (p.from_node, p.to_node):
            if end not in node_ids:
                violations.append(Violation(
                    p.id, "unknown-endpoint", f"path references unknown node {end!r}"))
        for label, usage in (("data_in_gb_per_month", p.data_in_gb_per_month),
                             ("data_out_gb_per_month", p.data_out_gb_per_month)):
            if usage.baseline < 0:
                violations.append(Violation(p.id, "negative-baseline", f"{label} must be >= 0"))

    known_ids = set(node_ids) | artifact_ids
    grouped_nodes: dict[str, str] = {}
    for g in model.groups:
        if not g.members:
            violations.append(Violation(g.id, "empty-group", "group has no members"))
        for m in g.members:
            if m not in known_ids:
                violations.append(Violation(
                    g.id, "dangling-member", f"group references unknown id {m!r}"))
            if m in node_ids:
                if m in grouped_nodes and grouped_nodes[m] != g.id:
                    violations.append(Violation(
                        g.id, "node-in-multiple-groups",
                        f"node {m!r} already belongs to group {grouped_nodes[m]!r}"))
                grouped_nodes[m] = g.id

    for node_id, binding in model.provider_bindings.items():
        if node_id not in node_ids:
            violations.append(Violation(
                node_id, "binding-for-unknown-node", "provider binding references unknown node"))
        if binding.purchase_mode == PurchaseMode.RESERVED and binding.term_months is None:
            violations.append(Violation(
                node_id, "reserved-missing-term", "reserved binding requires term_months"))

    return violations


def _validate_node(n: Node) -> list[Violation]:
    violations = []
    if n.kind == NodeKind.VIRTUAL_MACHINE:
        if (n.server_type is None) == (n.specs is None):
            violations.append(Violation(
                n.id, "server-sizing",
                "virtual-machine requires exactly one of server_type or specs"))
    if n.kind == NodeKind.REMOTE_NODE:
        if not (n.size_gb.is_zero and n.instance_count.is_zero
                and n.io_in_requests_per_month.is_zero and n.io_out_requests_per_month.is_zero):
            violations.append(Violation(
                n.id, "remote-node-usage", "remote node cannot carry billable usage"))
    for label, usage in (("size_gb", n.size_gb), ("instance_count", n.instance_count),
                         ("io_in_requests_per_month", n.io_in_requests_per_month),
                         ("io_out_requests_per_month", n.io_out_requests_per_month)):
        if usage.baseline < 0:
            violations.append(Violation(n.id, "negative-baseline", f"{label} must be >= 0"))
    return violations


# --- serialization ------------------------------------------------------------

def serialize_model(model: DeploymentModel) -> str:
    """Render a model back to its document form (parse_model round-trips it)."""
    return json.dumps(model_to_obj(model), indent=2, sort_keys=False) + "\n"


def model_to_obj(model: DeploymentModel) -> dict:
    doc: dict = {"schema": SCHEMA_VERSION, "name": model.name}
    doc["nodes"] = [_node_to_obj(n) for n in model.nodes]
    doc["artifacts"] = [{"id": a.id, "kind": a.kind, "deployed_on": a.deployed_on}
                        for a in model.artifacts]
    doc["paths"] = [_strip_nones({
        "id": p.id, "from": p.from_node, "to": p.to_node,
        "data_in_gb_per_month": _usage_to_obj(p.data_in_gb_per_month),
        "data_out_gb_per_month": _usage_to_obj(p.data_out_gb_per_month),
    }) for p in model.paths]
    doc["groups"] = [{"id": g.id, "label": g.label, "members": list(g.members)}
                     for g in model.groups]
    doc["provider_bindings"] = {
        node_id: _strip_nones({
            "provider": b.provider, "region": b.region,
            "purchase_mode": b.purchase_mode.value, "term_months": b.term_months,
        })
        for node_id, b in model.provider_bindings.items()
    }
    return doc


def _node_to_obj(n: Node) -> dict:
    obj = _strip_nones({
        "id": n.id, "kind": n.kind.value, "os": n.os, "server_type": n.server_type,
        "specs": {"cpu_ghz": n.specs.cpu_ghz, "ram_gb": n.specs.ram_gb} if n.specs else None,
        "storage_type": n.storage_type,
        "size_gb": _usage_to_obj(n.size_gb),
        "instance_count": _usage_to_obj(n.instance_count),
        "io_in_requests_per_month": _usage_to_obj(n.io_in_requests_per_month),
        "io_out_requests_per_month": _usage_to_obj(n.io_out_requests_per_month),
    })
    return obj


def _usage_to_obj(usage: UsageSpec):
    if usage.is_zero:
        return None
    if not usage.patterns:
        return usage.baseline
    return {"baseline": usage.baseline, "patterns": usage.to_text()}


def _strip_nones(obj: dict) -> dict:
    return {k: v for k, v in obj.items() if v is not None}
