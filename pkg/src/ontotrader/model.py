"""Domain types and validation for the three metamodels: the node/module
architecture, the implementation repository, and the configuration binding
the two together.

Validation is pure and order independent: permuting node or module lists
yields the same violation set. Violations are data, not exceptions; every
violation names the offending element by path and a stable rule id.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Union


@dataclass(frozen=True)
class SourceSpan:
    """Position of a parsed element: 1-based line/column plus length."""

    line: int
    column: int
    length: int = 1


class ModuleKind(str, Enum):
    SERVICE = "service"
    MANAGEMENT = "management"
    QUERY = "query"
    TRADING = "trading"
    PROCESSING = "processing"


# ---------------------------------------------------------------------------
# Architecture model
# ---------------------------------------------------------------------------

@dataclass
class TradingModuleSpec:
    name: str
    lookup: bool = True
    register: bool = True
    admin: bool = False
    link: bool = False
    proxy: bool = False
    federated_with: list[str] = field(default_factory=list)
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass
class QueryModuleSpec:
    name: str
    uses_lookup: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass
class ProcessingModuleSpec:
    name: str
    ambient: str
    uses_register: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass
class NamedModuleSpec:
    """Service and management modules carry only a name."""

    name: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass
class NodeSpec:
    name: str
    ip: str
    port: int
    dbport: int
    service_modules: list[NamedModuleSpec] = field(default_factory=list)
    management_modules: list[NamedModuleSpec] = field(default_factory=list)
    query_modules: list[QueryModuleSpec] = field(default_factory=list)
    trading_modules: list[TradingModuleSpec] = field(default_factory=list)
    processing_modules: list[ProcessingModuleSpec] = field(default_factory=list)
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def modules(self) -> list[tuple[ModuleKind, str, object]]:
        out: list[tuple[ModuleKind, str, object]] = []
        out += [(ModuleKind.SERVICE, m.name, m) for m in self.service_modules]
        out += [(ModuleKind.MANAGEMENT, m.name, m) for m in self.management_modules]
        out += [(ModuleKind.QUERY, m.name, m) for m in self.query_modules]
        out += [(ModuleKind.TRADING, m.name, m) for m in self.trading_modules]
        out += [(ModuleKind.PROCESSING, m.name, m) for m in self.processing_modules]
        return out


@dataclass
class SystemModel:
    name: str
    nodes: list[NodeSpec] = field(default_factory=list)
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Implementation repository model
# ---------------------------------------------------------------------------

@dataclass
class SimpleImpl:
    name: str
    uri: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass
class CompositeImpl:
    name: str
    uri: str
    submodules: list["ImplModule"] = field(default_factory=list)
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


ImplModule = Union[SimpleImpl, CompositeImpl]


@dataclass
class Platform:
    name: str
    modules: list[ImplModule] = field(default_factory=list)
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass
class RepositoryModel:
    platforms: list[Platform] = field(default_factory=list)
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Configuration model
# ---------------------------------------------------------------------------

@dataclass
class Statement:
    arch_module: str
    impl_module: str
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass
class ConfigurationModel:
    package_name: str
    imports: list[str] = field(default_factory=list)
    statements: list[Statement] = field(default_factory=list)
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Violations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    path: str
    message: str


class RefError(Exception):
    def __init__(self, ref: str, message: str) -> None:
        super().__init__(message)
        self.ref = ref


class RefNotFound(RefError):
    pass


class RefAmbiguous(RefError):
    pass


@dataclass(frozen=True)
class ArchModuleHandle:
    node: NodeSpec
    kind: ModuleKind
    name: str

    @property
    def path(self) -> str:
        return f"{self.node.name}.{self.name}"


@dataclass(frozen=True)
class ImplModuleHandle:
    platform: Platform
    module: ImplModule

    @property
    def path(self) -> str:
        return f"{self.platform.name}.{self.module.name}"


def resolve_arch_module(
    system: SystemModel,
    ref: str,
    *,
    local_node: NodeSpec | None = None,
    kind: ModuleKind | None = None,
) -> ArchModuleHandle:
    """Resolve a module reference inside an architecture model.

    Unqualified names resolve node-locally first (when a local node is
    given), then must match exactly one module system-wide. Qualified names
    match by their trailing Node.Module segments; longer prefixes are
    tolerated (package/system aliases differ across real configurations).
    """
    segments = [s for s in ref.split(".") if s]
    if not segments:
        raise RefNotFound(ref, "empty module reference")

    def candidates_in(node: NodeSpec, name: str) -> list[ArchModuleHandle]:
        return [
            ArchModuleHandle(node, k, n)
            for k, n, _ in node.modules()
            if n == name and (kind is None or k is kind)
        ]

    if len(segments) == 1:
        name = segments[0]
        if local_node is not None:
            local = candidates_in(local_node, name)
            if len(local) == 1:
                return local[0]
            if len(local) > 1:
                raise RefAmbiguous(ref, f"{name} matches several modules in {local_node.name}")
        found = [h for node in system.nodes for h in candidates_in(node, name)]
        if not found:
            raise RefNotFound(ref, f"no module named {name}")
        if len(found) > 1:
            where = ", ".join(h.path for h in found)
            raise RefAmbiguous(ref, f"{name} matches several modules: {where}")
        return found[0]

    node_name, module_name = segments[-2], segments[-1]
    found = [
        h
        for node in system.nodes
        if node.name == node_name
        for h in candidates_in(node, module_name)
    ]
    if not found:
        raise RefNotFound(ref, f"no module {module_name} on node {node_name}")
    if len(found) > 1:
        raise RefAmbiguous(ref, f"{node_name}.{module_name} is not unique")
    return found[0]


def resolve_impl_module(repo: RepositoryModel, ref: str) -> ImplModuleHandle:
    """Resolve an implementation-module reference by trailing
    Platform.Module segments (or a globally unique bare module name)."""
    segments = [s for s in ref.split(".") if s]
    if not segments:
        raise RefNotFound(ref, "empty implementation reference")

    def walk(platform: Platform):
        stack = list(platform.modules)
        while stack:
            module = stack.pop()
            yield module
            if isinstance(module, CompositeImpl):
                stack.extend(module.submodules)

    if len(segments) == 1:
        name = segments[0]
        found = [
            ImplModuleHandle(p, m)
            for p in repo.platforms
            for m in walk(p)
            if m.name == name
        ]
    else:
        platform_name, name = segments[-2], segments[-1]
        found = [
            ImplModuleHandle(p, m)
            for p in repo.platforms
            if p.name == platform_name
            for m in walk(p)
            if m.name == name
        ]
    if not found:
        raise RefNotFound(ref, f"no implementation module matches {ref}")
    if len(found) > 1:
        raise RefAmbiguous(ref, f"{ref} matches several implementation modules")
    return found[0]


# ---------------------------------------------------------------------------
# Architecture validation
# ---------------------------------------------------------------------------

_IP_RE = re.compile(r"^(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})$")


def _ip_ok(ip: str) -> bool:
    m = _IP_RE.match(ip)
    return bool(m) and all(0 <= int(part) <= 255 for part in m.groups())


def _port_ok(port: int) -> bool:
    return isinstance(port, int) and 1 <= port <= 65535


def validate_system(model: SystemModel) -> list[Violation]:
    """Structural constraints on an architecture model. Empty list iff the
    model is valid."""
    violations: list[Violation] = []
    v = violations.append

    if not model.nodes:
        v(Violation("nodes-nonempty", model.name, "system must have at least one node"))
        return violations

    names = [n.name for n in model.nodes]
    for name in sorted({n for n in names if names.count(n) > 1}):
        v(Violation("node-name-unique", name, f"node name {name} is not unique"))

    if not any(node.trading_modules for node in model.nodes):
        v(Violation("system-needs-trader", model.name,
                    "system must contain a trading module in at least one node"))
    if not any(node.processing_modules for node in model.nodes):
        v(Violation("system-needs-processor", model.name,
                    "system must contain a processing module in at least one node"))

    for node in model.nodes:
        if not _ip_ok(node.ip):
            v(Violation("ip-syntax", node.name, f"ip {node.ip!r} is not a dotted quad"))
        if not _port_ok(node.port):
            v(Violation("port-range", node.name, f"port {node.port} outside 1..65535"))
        if not _port_ok(node.dbport):
            v(Violation("dbport-range", node.name, f"dbport {node.dbport} outside 1..65535"))
        if not node.service_modules:
            v(Violation("service-nonempty", node.name, "node needs at least one service module"))
        if not node.management_modules:
            v(Violation("management-nonempty", node.name, "node needs at least one management module"))
        if not node.query_modules:
            v(Violation("query-nonempty", node.name, "node needs at least one query module"))

        module_names = [name for _, name, _ in node.modules()]
        for name in sorted({n for n in module_names if module_names.count(n) > 1}):
            v(Violation("module-name-unique", f"{node.name}.{name}",
                        f"module name {name} is not unique within {node.name}"))

        for tm in node.trading_modules:
            path = f"{node.name}.{tm.name}"
            if not (tm.lookup and tm.register):
                v(Violation("trader-mandatory-interfaces", path,
                            "trading modules must implement Lookup and Register"))
            for target_ref in tm.federated_with:
                try:
                    target = resolve_arch_module(
                        model, target_ref, local_node=node, kind=ModuleKind.TRADING
                    )
                except RefNotFound:
                    v(Violation("dangling-ref", path,
                                f"federation target {target_ref} does not resolve"))
                    continue
                except RefAmbiguous:
                    v(Violation("ambiguous-ref", path,
                                f"federation target {target_ref} is ambiguous"))
                    continue
                if target.node is node and target.name == tm.name:
                    v(Violation("federation-distinct", path,
                                "a trading module cannot federate with itself"))
                    continue
                other = _trading_spec(target)
                if not (tm.link and other.link):
                    culprit = path if not tm.link else target.path
                    v(Violation("federation-link-required", path,
                                f"federation requires the Link interface on both ends; {culprit} lacks it"))

        for qm in node.query_modules:
            path = f"{node.name}.{qm.name}"
            _check_binding(model, node, path, qm.uses_lookup, "usesLookupInterface", violations)
        for pm in node.processing_modules:
            path = f"{node.name}.{pm.name}"
            _check_binding(model, node, path, pm.uses_register, "usesRegisterInterface", violations)

    return violations


def _trading_spec(handle: ArchModuleHandle) -> TradingModuleSpec:
    for tm in handle.node.trading_modules:
        if tm.name == handle.name:
            return tm
    raise RefNotFound(handle.name, "not a trading module")


def _check_binding(
    model: SystemModel,
    node: NodeSpec,
    path: str,
    ref: str,
    relation: str,
    violations: list[Violation],
) -> None:
    try:
        resolve_arch_module(model, ref, local_node=node, kind=ModuleKind.TRADING)
    except RefNotFound:
        violations.append(Violation(
            "dangling-ref", path, f"{relation} {ref} does not resolve to a trading module"))
    except RefAmbiguous:
        violations.append(Violation(
            "ambiguous-ref", path, f"{relation} {ref} is ambiguous"))


# ---------------------------------------------------------------------------
# Repository validation
# ---------------------------------------------------------------------------

def validate_repository(model: RepositoryModel) -> list[Violation]:
    violations: list[Violation] = []
    v = violations.append

    platform_names = [p.name for p in model.platforms]
    for name in sorted({n for n in platform_names if platform_names.count(n) > 1}):
        v(Violation("platform-name-unique", name, f"platform name {name} is not unique"))

    for platform in model.platforms:
        if not platform.modules:
            v(Violation("platform-nonempty", platform.name,
                        "platform must provide at least one module implementation"))
            continue

        seen_names: dict[str, int] = {}
        containers: dict[int, str] = {}

        def visit(module: ImplModule, trail: list[int], container: str | None) -> None:
            path = f"{platform.name}.{module.name}"
            if id(module) in trail:
                v(Violation("containment-acyclic", path,
                            f"{module.name} contains itself"))
                return
            if container is not None:
                if id(module) in containers:
                    v(Violation("container-unique", path,
                                f"{module.name} appears under {containers[id(module)]} and {container}"))
                else:
                    containers[id(module)] = container
            seen_names[module.name] = seen_names.get(module.name, 0) + 1
            if isinstance(module, CompositeImpl):
                if not module.submodules:
                    v(Violation("composite-nonempty", path,
                                f"composite module {module.name} has no submodules"))
                for sub in module.submodules:
                    visit(sub, trail + [id(module)], module.name)

        for module in platform.modules:
            visit(module, [], None)

        for name in sorted(n for n, count in seen_names.items() if count > 1):
            v(Violation("impl-name-unique", f"{platform.name}.{name}",
                        f"module name {name} is not unique within platform {platform.name}"))

    return violations


# ---------------------------------------------------------------------------
# Configuration validation
# ---------------------------------------------------------------------------

def validate_configuration(
    cfg: ConfigurationModel, arch: SystemModel, repo: RepositoryModel
) -> tuple[list[Violation], bool]:
    """Check every statement resolves and the mapping is injective; the
    deployability flag is true only when additionally every module of every
    node is mapped (total mapping)."""
    violations: list[Violation] = []
    v = violations.append
    mapped: dict[str, list[Statement]] = {}
    refs_ok = True

    for stmt in cfg.statements:
        try:
            handle = resolve_arch_module(arch, stmt.arch_module)
        except RefNotFound:
            v(Violation("unresolved-ref", stmt.arch_module,
                        f"hasTKRSModule {stmt.arch_module} does not resolve"))
            refs_ok = False
            handle = None
        except RefAmbiguous:
            v(Violation("ambiguous-ref", stmt.arch_module,
                        f"hasTKRSModule {stmt.arch_module} is ambiguous"))
            refs_ok = False
            handle = None
        try:
            resolve_impl_module(repo, stmt.impl_module)
        except RefNotFound:
            v(Violation("unresolved-ref", stmt.impl_module,
                        f"hasImplementationRepositoryModule {stmt.impl_module} does not resolve"))
            refs_ok = False
        except RefAmbiguous:
            v(Violation("ambiguous-ref", stmt.impl_module,
                        f"hasImplementationRepositoryModule {stmt.impl_module} is ambiguous"))
            refs_ok = False
        if handle is not None:
            mapped.setdefault(handle.path, []).append(stmt)

    for path in sorted(p for p, stmts in mapped.items() if len(stmts) > 1):
        v(Violation("duplicate-statement", path,
                    f"{path} is mapped by more than one statement"))
        refs_ok = False

    total = True
    for node in arch.nodes:
        for _, name, _ in node.modules():
            path = f"{node.name}.{name}"
            if path not in mapped:
                v(Violation("unmapped-module", path, f"{path} has no implementation statement"))
                total = False

    return violations, refs_ok and total
