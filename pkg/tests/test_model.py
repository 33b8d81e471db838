import copy
import random

import pytest

from ontotrader.model import (
    CompositeImpl,
    ConfigurationModel,
    ModuleKind,
    NamedModuleSpec,
    NodeSpec,
    Platform,
    ProcessingModuleSpec,
    QueryModuleSpec,
    RefAmbiguous,
    RefNotFound,
    RepositoryModel,
    SimpleImpl,
    Statement,
    SystemModel,
    TradingModuleSpec,
    resolve_arch_module,
    resolve_impl_module,
    validate_configuration,
    validate_repository,
    validate_system,
)


def make_node(i, *, trader=True, processor=False, federate=None, link=True, trader_ref=None):
    name = f"Node_{i}"
    trading = []
    if trader:
        trading.append(TradingModuleSpec(
            name=f"TradingModule_{i}_1", lookup=True, register=True,
            admin=False, link=link, proxy=False,
            federated_with=list(federate or []),
        ))
    processing = []
    if processor:
        processing.append(ProcessingModuleSpec(
            name=f"ProcessingModule_{i}_1", ambient=f"Ambient_{i}",
            uses_register=trader_ref or f"TradingModule_{i}_1",
        ))
    return NodeSpec(
        name=name, ip=f"192.168.1.{10 + i}", port=1099, dbport=3306,
        service_modules=[NamedModuleSpec(f"ServiceModule_{i}_1")],
        management_modules=[NamedModuleSpec(f"ManagementModule_{i}_1")],
        query_modules=[QueryModuleSpec(f"QueryModule_{i}_1", trader_ref or f"TradingModule_{i}_1")],
        trading_modules=trading,
        processing_modules=processing,
    )


def case_study_system():
    """The published three-node model, built programmatically."""
    node1 = make_node(1, trader=True, processor=True,
                      federate=["Node_2.TradingModule_2_1"],
                      trader_ref="TradingModule_1_1")
    node1.processing_modules[0].uses_register = "Node_2.TradingModule_2_1"
    node2 = make_node(2, trader=True)
    node3 = make_node(3, trader=False, trader_ref="Node_2.TradingModule_2_1")
    return SystemModel("SOLERES_KRS", [node1, node2, node3])


def rules(violations):
    return {v.rule for v in violations}


class TestValidateSystem:
    def test_case_study_model_is_clean(self):
        assert validate_system(case_study_system()) == []

    def test_zero_nodes(self):
        assert rules(validate_system(SystemModel("S", []))) == {"nodes-nonempty"}

    def test_dropping_all_traders_breaks_bindings_too(self):
        system = case_study_system()
        for node in system.nodes:
            node.trading_modules = []
        got = rules(validate_system(system))
        assert "system-needs-trader" in got
        assert "dangling-ref" in got

    def test_drop_query_module(self):
        system = case_study_system()
        system.nodes[2].query_modules = []
        assert rules(validate_system(system)) == {"query-nonempty"}

    def test_drop_all_processing_modules(self):
        system = case_study_system()
        system.nodes[0].processing_modules = []
        assert rules(validate_system(system)) == {"system-needs-processor"}

    def test_federation_with_link_disabled(self):
        system = case_study_system()
        system.nodes[1].trading_modules[0].link = False
        got = validate_system(system)
        assert rules(got) == {"federation-link-required"}
        assert "Node_2.TradingModule_2_1" in got[0].message

    def test_self_federation(self):
        system = case_study_system()
        system.nodes[0].trading_modules[0].federated_with = ["TradingModule_1_1"]
        assert rules(validate_system(system)) == {"federation-distinct"}

    def test_dangling_federation_target(self):
        system = case_study_system()
        system.nodes[0].trading_modules[0].federated_with = ["Node_9.TradingModule_9_1"]
        assert rules(validate_system(system)) == {"dangling-ref"}

    def test_dangling_query_binding(self):
        system = case_study_system()
        system.nodes[2].query_modules[0].uses_lookup = "Node_9.Missing"
        got = validate_system(system)
        assert rules(got) == {"dangling-ref"}
        assert got[0].path == "Node_3.QueryModule_3_1"

    def test_dangling_register_binding(self):
        system = case_study_system()
        system.nodes[0].processing_modules[0].uses_register = "Nowhere"
        assert rules(validate_system(system)) == {"dangling-ref"}

    def test_trader_without_mandatory_interfaces(self):
        system = case_study_system()
        system.nodes[1].trading_modules[0].register = False
        assert rules(validate_system(system)) == {"trader-mandatory-interfaces"}

    def test_duplicate_node_names(self):
        system = case_study_system()
        system.nodes[2].name = "Node_1"
        got = rules(validate_system(system))
        assert "node-name-unique" in got

    def test_duplicate_module_names_within_node(self):
        system = case_study_system()
        system.nodes[0].service_modules.append(NamedModuleSpec("ManagementModule_1_1"))
        assert "module-name-unique" in rules(validate_system(system))

    def test_bad_ip_and_ports(self):
        system = case_study_system()
        system.nodes[0].ip = "192.168.1"
        system.nodes[1].port = 0
        system.nodes[2].dbport = 70000
        assert rules(validate_system(system)) == {"ip-syntax", "port-range", "dbport-range"}

    def test_empty_service_and_management_lists(self):
        system = case_study_system()
        system.nodes[0].service_modules = []
        system.nodes[1].management_modules = []
        assert rules(validate_system(system)) == {"service-nonempty", "management-nonempty"}

    def test_validation_is_order_independent(self):
        rng = random.Random(11)
        base = case_study_system()
        base.nodes[2].query_modules[0].uses_lookup = "Node_9.Missing"
        base.nodes[1].trading_modules[0].register = False
        reference = set(validate_system(base))
        for _ in range(5):
            shuffled = copy.deepcopy(base)
            rng.shuffle(shuffled.nodes)
            for node in shuffled.nodes:
                rng.shuffle(node.query_modules)
                rng.shuffle(node.trading_modules)
                rng.shuffle(node.processing_modules)
            assert set(validate_system(shuffled)) == reference


class TestResolveRef:
    def test_qualified_cross_node(self):
        handle = resolve_arch_module(case_study_system(), "Node_2.TradingModule_2_1")
        assert handle.node.name == "Node_2"
        assert handle.kind is ModuleKind.TRADING

    def test_local_unqualified(self):
        system = case_study_system()
        node1 = system.nodes[0]
        handle = resolve_arch_module(system, "TradingModule_1_1", local_node=node1)
        assert handle.path == "Node_1.TradingModule_1_1"

    def test_not_found(self):
        with pytest.raises(RefNotFound):
            resolve_arch_module(case_study_system(), "Node_9.X")

    def test_unqualified_ambiguous(self):
        system = case_study_system()
        for node in system.nodes:
            node.service_modules = [NamedModuleSpec("Shared")]
        with pytest.raises(RefAmbiguous):
            resolve_arch_module(system, "Shared")

    def test_lenient_prefix_matching(self):
        handle = resolve_arch_module(case_study_system(), "SOLERES.KRS.Node_1.ServiceModule_1_1")
        assert handle.path == "Node_1.ServiceModule_1_1"


def java_platform():
    mods = [
        SimpleImpl("ServiceModuleImpl", "http://.../acg/rep/TKRS/ServiceModule.class"),
        SimpleImpl("ManagementModuleImpl", "http://.../acg/rep/TKRS/ManagementModule.class"),
        SimpleImpl("QueryModuleImpl", "http://.../acg/rep/TKRS/QueryModule.class"),
        SimpleImpl("TradingModuleImpl", "http://.../acg/rep/TKRS/TradingModule.class"),
        SimpleImpl("ProcessingModuleImpl", "http://.../acg/rep/TKRS/ProcessingModule.class"),
    ]
    return RepositoryModel([Platform("Java_JADE", mods)])


class TestValidateRepository:
    def test_java_platform_clean(self):
        assert validate_repository(java_platform()) == []

    def test_platform_with_no_modules(self):
        repo = RepositoryModel([Platform("Empty", [])])
        assert rules(validate_repository(repo)) == {"platform-nonempty"}

    def test_composite_containing_itself(self):
        composite = CompositeImpl("Loop", "http://x", [])
        composite.submodules.append(composite)
        repo = RepositoryModel([Platform("P", [composite])])
        assert "containment-acyclic" in rules(validate_repository(repo))

    def test_module_under_two_containers(self):
        shared = SimpleImpl("Shared", "http://x")
        a = CompositeImpl("A", "http://a", [shared])
        b = CompositeImpl("B", "http://b", [shared])
        repo = RepositoryModel([Platform("P", [a, b])])
        got = rules(validate_repository(repo))
        assert "container-unique" in got

    def test_duplicate_names_within_platform(self):
        repo = RepositoryModel([Platform("P", [SimpleImpl("X", "u1"), SimpleImpl("X", "u2")])])
        assert "impl-name-unique" in rules(validate_repository(repo))

    def test_nested_composites_are_fine(self):
        inner = SimpleImpl("Inner", "http://i")
        outer = CompositeImpl("Outer", "http://o", [inner])
        repo = RepositoryModel([Platform("P", [outer])])
        assert validate_repository(repo) == []


def case_study_configuration():
    statements = []
    for node, mods in (
        (1, ["ServiceModule_1_1", "ManagementModule_1_1", "QueryModule_1_1",
             "TradingModule_1_1", "ProcessingModule_1_1"]),
        (2, ["ServiceModule_2_1", "ManagementModule_2_1", "QueryModule_2_1",
             "TradingModule_2_1"]),
        (3, ["ServiceModule_3_1", "ManagementModule_3_1", "QueryModule_3_1"]),
    ):
        for mod in mods:
            impl = mod.split("_")[0] + "Impl"
            statements.append(Statement(
                arch_module=f"SOLERES.KRS.Node_{node}.{mod}",
                impl_module=f"ACG_Repository.Java_JADE.{impl}",
            ))
    return ConfigurationModel("SOLERES_Configuration", [], statements)


class TestValidateConfiguration:
    def test_case_study_mapping_is_deployable(self):
        report, deployable = validate_configuration(
            case_study_configuration(), case_study_system(), java_platform())
        assert report == []
        assert deployable

    def test_removing_a_statement_is_not_deployable(self):
        cfg = case_study_configuration()
        cfg.statements = [s for s in cfg.statements if "QueryModule_3_1" not in s.arch_module]
        report, deployable = validate_configuration(cfg, case_study_system(), java_platform())
        assert not deployable
        assert [v for v in report if v.rule == "unmapped-module"][0].path == "Node_3.QueryModule_3_1"

    def test_nonexistent_impl_ref(self):
        cfg = case_study_configuration()
        cfg.statements[0].impl_module = "Java_JADE.Bogus"
        report, deployable = validate_configuration(cfg, case_study_system(), java_platform())
        assert not deployable
        assert "unresolved-ref" in rules(report)

    def test_duplicate_statement_for_one_module(self):
        cfg = case_study_configuration()
        cfg.statements.append(cfg.statements[0])
        report, deployable = validate_configuration(cfg, case_study_system(), java_platform())
        assert not deployable
        assert "duplicate-statement" in rules(report)

    def test_impl_refs_resolve_leniently(self):
        assert resolve_impl_module(java_platform(), "Java_JADE.QueryModuleImpl").path == \
            "Java_JADE.QueryModuleImpl"
        assert resolve_impl_module(java_platform(), "QueryModuleImpl").path == \
            "Java_JADE.QueryModuleImpl"
        with pytest.raises(RefNotFound):
            resolve_impl_module(java_platform(), "Java_JADE.Bogus")
