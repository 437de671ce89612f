import logging
from unittest.mock import MagicMock

import pytest

from uv_path_graphs.src.chains.theorem_check import TheoremCheckChain
from uv_path_graphs.src.corpus import (
    Corpus,
    Instance,
    exhaustive_corpus,
    fixture_corpus,
    k4_plane_fixture,
    plane_corpus,
    random_corpus,
)
from uv_path_graphs.src.cycle_space import internal_faces
from uv_path_graphs.src.errors import EnumerationLimitError, PathSpaceError
from uv_path_graphs.src.pydantic_models.pydantic_models import CorpusSpec
from uv_path_graphs.src.theorem_suite import (
    corpus_for,
    run_theorem_suite,
    search_tightness_witness,
    verify,
)
from uv_path_graphs.src.theorems import (
    THEOREM_IDS,
    CheckOptions,
    check_closure_properties,
    check_dense_connected,
    check_diameter_bound,
    check_faces_dense,
    check_necessary_condition,
    check_path_graph_connected,
    check_spanning_counterexample,
)


@pytest.fixture
def options():
    return CheckOptions(seed=1, merge_samples=5, closure_orders=3)


@pytest.fixture
def fixture_instance():
    return fixture_corpus().instances[0]


########## individual checks ##########

def test_spanning_counterexample_reproduces(fixture_instance, options):
    report = check_spanning_counterexample(fixture_instance, options)
    assert report.verdict == "pass"
    assert report.metrics["path_count"] == 5
    assert report.metrics["rank"] == 3
    assert report.metrics["spans"] is True
    assert report.metrics["components"] == 2
    assert report.metrics["isolated"] == "u-y-x-v"
    assert report.counterexample is None


def test_spanning_counterexample_needs_endpoints(options):
    G, emb = k4_plane_fixture()
    inst = Instance(graph=G, cycles=internal_faces(G, emb))
    with pytest.raises(PathSpaceError):
        check_spanning_counterexample(inst, options)


def test_path_graph_checks_pass_on_small_graphs(options):
    for inst in exhaustive_corpus(4).instances:
        assert check_path_graph_connected(inst, options).verdict == "pass"
        assert check_diameter_bound(inst, options).verdict == "pass"


def test_necessary_condition_on_the_fixture(fixture_instance, options):
    report = check_necessary_condition(fixture_instance, options)
    assert report.verdict == "pass"
    assert report.metrics["spans"] is True
    assert report.metrics["connected_pairs"] == 0


def test_necessary_condition_needs_a_cycle_set(options):
    inst = exhaustive_corpus(3).instances[0]
    with pytest.raises(PathSpaceError):
        check_necessary_condition(inst, options)


def test_dense_check_skips_sparse_cycle_sets(fixture_instance, options):
    assert check_dense_connected(fixture_instance, options) is None


def test_dense_check_on_plane_faces(options):
    for inst in plane_corpus(4).instances:
        report = check_dense_connected(inst, options)
        assert report is not None
        assert report.verdict == "pass"


def test_faces_check(options):
    G, emb = k4_plane_fixture()
    report = check_faces_dense(Instance(graph=G, embedding=emb), options)
    assert report.verdict == "pass"
    assert report.metrics["faces"] == 3


def test_closure_check(options):
    for inst in random_corpus(5, seed=3, max_n=5).instances:
        assert check_closure_properties(inst, options).verdict == "pass"


def test_reports_are_reproducible(options):
    inst = exhaustive_corpus(4).instances[-1]
    first = check_path_graph_connected(inst, options)
    again = check_path_graph_connected(inst, options)
    assert first.metrics == again.metrics


########## chain ##########

def test_chain_keys():
    chain = TheoremCheckChain()
    assert chain.input_keys == ["theorem", "instance"]
    assert chain.output_keys == ["theorem", "index", "report"]


def test_chain_invoke(fixture_instance):
    chain = TheoremCheckChain(options=CheckOptions(seed=1))
    result = chain.invoke({"theorem": "T3-counterexample", "instance": fixture_instance})
    assert result["theorem"] == "T3-counterexample"
    assert result["index"] == 0
    assert result["report"].verdict == "pass"
    assert result["report"].duration >= 0.0


def test_chain_skips_on_enumeration_guard(fixture_instance, caplog):
    check = MagicMock(side_effect=EnumerationLimitError("too many paths"))
    chain = TheoremCheckChain(checks={"T1": check})
    with caplog.at_level(logging.WARNING):
        result = chain._call({"theorem": "T1", "instance": fixture_instance})
    assert result["report"] is None
    assert "too many paths" in caplog.text
    check.assert_called_once()


def test_chain_reraises_other_errors(fixture_instance):
    check = MagicMock(side_effect=RuntimeError("boom"))
    chain = TheoremCheckChain(checks={"T1": check})
    with pytest.raises(RuntimeError, match="boom"):
        chain._call({"theorem": "T1", "instance": fixture_instance})


def test_chain_rejects_unknown_theorems(fixture_instance):
    with pytest.raises(KeyError):
        TheoremCheckChain()._call({"theorem": "T99", "instance": fixture_instance})


def test_chain_passes_its_options(fixture_instance):
    options = CheckOptions(seed=42)
    check = MagicMock(return_value=None)
    TheoremCheckChain(options=options, checks={"CL": check})._call(
        {"theorem": "CL", "instance": fixture_instance})
    check.assert_called_once_with(fixture_instance, options)


########## suite ##########

def test_run_theorem_suite_keeps_instance_order(options):
    corpus = exhaustive_corpus(4)
    reports, skipped = run_theorem_suite(corpus, ["T1", "T2"], options=options, max_workers=4)
    assert skipped == 0
    assert [(r.theorem, r.index) for r in reports] == (
        [("T1", i) for i in range(4)] + [("T2", i) for i in range(4)])
    assert all(r.verdict == "pass" for r in reports)


def test_run_theorem_suite_counts_skips(fixture_instance):
    chain = TheoremCheckChain(checks={"T1": MagicMock(side_effect=EnumerationLimitError("guard"))})
    corpus = Corpus(spec=CorpusSpec(kind="fixture"), instances=(fixture_instance,))
    reports, skipped = run_theorem_suite(corpus, ["T1"], chain=chain)
    assert reports == []
    assert skipped == 1


def test_run_theorem_suite_rejects_unknown_ids():
    with pytest.raises(PathSpaceError, match="T99"):
        run_theorem_suite(fixture_corpus(), ["T99"])


def test_run_theorem_suite_on_an_empty_corpus():
    assert run_theorem_suite(Corpus(spec=CorpusSpec(kind="fixture")), ["T1"]) == ([], 0)


def test_corpus_for_shares_cached_corpora():
    cache = {}
    first = corpus_for("T6", max_n=4, cache=cache)
    assert corpus_for("C2", max_n=4, cache=cache) is first
    assert corpus_for("T3-counterexample").spec.kind == "fixture"
    with pytest.raises(PathSpaceError):
        corpus_for("T99")


def test_verify_the_counterexample():
    suite = verify(["T3-counterexample"], seed=1)
    assert suite.passed
    assert suite.theorems == ["T3-counterexample"]
    assert suite.corpora["T3-counterexample"].kind == "fixture"
    assert suite.summary() == {"T3-counterexample": {"pass": 1, "fail": 0, "witness": 0}}


def test_verify_small_corpora():
    suite = verify(["T1", "T2", "T6", "C2", "C3"], seed=1, max_n=4)
    assert suite.passed
    assert suite.skipped == 0
    assert {r.theorem for r in suite.reports} == {"T1", "T2", "T6", "C2", "C3"}


def test_every_theorem_has_a_corpus():
    assert len(THEOREM_IDS) == 12
    for theorem in THEOREM_IDS:
        assert theorem in ("T1", "T2", "T3", "T3-counterexample", "T4", "T5",
                           "C1", "T6", "C2", "C3", "L1", "CL")


@pytest.mark.slow
def test_verify_full_default_suite():
    suite = verify(["T1", "T2", "T5", "C1", "T6", "C2", "C3"], seed=1, max_n=6)
    assert suite.passed


########## tightness ##########

def test_tightness_search_on_small_graphs():
    result = search_tightness_witness(max_n=4, seed=1)
    assert result.graphs_scanned == 4
    assert result.pairs_scanned >= 1
    assert result.distance >= 2
    assert result.diameter <= 2 * result.distance
    assert result.S is not None and result.T is not None
    assert result.tight == (result.diameter == 2 * result.distance)


def test_tightness_search_is_capped():
    with pytest.raises(EnumerationLimitError):
        search_tightness_witness(max_n=9)
