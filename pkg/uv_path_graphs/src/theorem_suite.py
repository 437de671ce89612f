import logging
import math
import random
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from tqdm import tqdm

from config.common_settings import settings
from uv_path_graphs.src.chains.theorem_check import TheoremCheckChain
from uv_path_graphs.src.corpus import (
    ATLAS_MAX_N,
    Corpus,
    dense_corpus,
    exhaustive_corpus,
    fixture_corpus,
    plane_corpus,
    random_corpus,
    random_two_connected_graph,
    two_connected_graphs,
)
from uv_path_graphs.src.errors import EnumerationLimitError, PathSpaceError
from uv_path_graphs.src.graph_core import Graph, distance as graph_distance
from uv_path_graphs.src.path_space import build_path_graph, farthest_pair
from uv_path_graphs.src.pydantic_models.pydantic_models import (
    GraphDocument,
    SuiteReport,
    TheoremReport,
    TightnessResult,
)
from uv_path_graphs.src.theorems import THEOREM_IDS, CheckOptions

# Set up a logger for the module
logger = logging.getLogger(__name__)

NECESSARY_CONDITION_INSTANCES = 500
SMALL_N = 5
TIGHTNESS_HARD_CAP = 8


def run_theorem_suite(corpus: Corpus,
                      which: Sequence[str],
                      options: Optional[CheckOptions] = None,
                      max_workers: Optional[int] = None,
                      chain: Optional[TheoremCheckChain] = None) -> Tuple[List[TheoremReport], int]:
    """
    Run the checks `which` on every instance of `corpus`.

    Instances run through `TheoremCheckChain.batch`, which keeps input order, so
    the reports come back sorted by (theorem, instance index) whatever the
    concurrency. Returns the reports and the number of skipped (instance, theorem)
    runs.
    """
    unknown = [t for t in which if t not in THEOREM_IDS]
    if unknown:
        raise PathSpaceError(f"unknown theorem id(s): {', '.join(unknown)}")

    chain = chain or TheoremCheckChain(options=options)
    inputs = [{"theorem": t, "instance": inst} for t in which for inst in corpus.instances]
    if not inputs:
        return [], 0

    workers = settings.MAX_WORKERS if max_workers is None else max_workers
    logger.info("Running %s on %d instances (%s corpus)", ",".join(which), len(corpus), corpus.spec.kind)
    results = chain.batch(inputs, config={"max_concurrency": workers})

    reports = [r["report"] for r in results if r["report"] is not None]
    skipped = len(results) - len(reports)
    if skipped:
        logger.warning("%d of %d checks skipped", skipped, len(results))
    return reports, skipped


def corpus_for(theorem: str,
               seed: Optional[int] = None,
               max_n: Optional[int] = None,
               cache: Optional[Dict[str, Corpus]] = None) -> Corpus:
    """
    The default corpus for a theorem id.

    T1/T2 use every 2-connected graph up to max_n; T3 500 random (G, C); T4
    RANDOM_INSTANCES dense instances; T5/C1 the planar graphs with n <= 5;
    T6/C2/C3 the graphs with n <= 5; L1/CL 100 random (G, C) with n <= 5.
    """
    seed = settings.SEED if seed is None else seed
    max_n = settings.CORPUS_MAX_N if max_n is None else max_n
    small = min(max_n, SMALL_N)
    builders = {
        "T1": ("exhaustive", lambda: exhaustive_corpus(max_n)),
        "T2": ("exhaustive", lambda: exhaustive_corpus(max_n)),
        "T3": ("necessary", lambda: random_corpus(NECESSARY_CONDITION_INSTANCES, seed, max_n=min(max_n, 6))),
        "T3-counterexample": ("fixture", fixture_corpus),
        "T4": ("dense", lambda: dense_corpus(settings.RANDOM_INSTANCES, seed, max_n=small)),
        "T5": ("plane", lambda: plane_corpus(small)),
        "C1": ("plane", lambda: plane_corpus(small)),
        "T6": ("small", lambda: exhaustive_corpus(small)),
        "C2": ("small", lambda: exhaustive_corpus(small)),
        "C3": ("small", lambda: exhaustive_corpus(small)),
        "L1": ("closure", lambda: random_corpus(100, seed, max_n=small)),
        "CL": ("closure", lambda: random_corpus(100, seed, max_n=small)),
    }
    if theorem not in builders:
        raise PathSpaceError(f"unknown theorem id {theorem!r}")
    key, build = builders[theorem]
    if cache is None:
        return build()
    if key not in cache:
        cache[key] = build()
    return cache[key]


def verify(which: Optional[Sequence[str]] = None,
           seed: Optional[int] = None,
           max_n: Optional[int] = None,
           max_paths: Optional[int] = None,
           max_workers: Optional[int] = None) -> SuiteReport:
    """Run each theorem on its default corpus and collect one SuiteReport."""
    which = list(which or THEOREM_IDS)
    seed = settings.SEED if seed is None else seed
    cache: Dict[str, Corpus] = {}
    reports: List[TheoremReport] = []
    corpora = {}
    skipped = 0
    for theorem in which:
        corpus = corpus_for(theorem, seed=seed, max_n=max_n, cache=cache)
        samples = math.ceil(settings.MERGE_SAMPLES / len(corpus)) if len(corpus) else 0
        options = CheckOptions(seed=seed, merge_samples=samples, max_paths=max_paths)
        got, missed = run_theorem_suite(corpus, [theorem], options=options, max_workers=max_workers)
        reports.extend(got)
        skipped += missed
        corpora[theorem] = corpus.spec

    suite = SuiteReport(seed=seed, theorems=which, corpora=corpora, reports=reports, skipped=skipped)
    for theorem, counts in suite.summary().items():
        logger.info("%s: %d pass, %d fail, %d witness", theorem, counts["pass"], counts["fail"], counts["witness"])
    return suite


########## tightness of the diameter bound ##########

def _tightness_graphs(max_n: int, seed: int) -> List[Graph]:
    graphs = two_connected_graphs(min(max_n, ATLAS_MAX_N), allow_n7=True)
    if max_n > ATLAS_MAX_N:
        rng = random.Random(seed)
        graphs.extend(random_two_connected_graph(rng, max_n) for _ in range(settings.RANDOM_INSTANCES))
    return graphs


def _scan(graphs: Iterable[Graph], min_distance: int, result: TightnessResult,
          show_progress: bool) -> TightnessResult:
    best_key = None
    for G in tqdm(graphs, desc="Searching for a tight instance", disable=not show_progress):
        for u in range(G.vertex_count):
            for v in range(u + 1, G.vertex_count):
                d = graph_distance(G, u, v)
                if d < min_distance:
                    continue
                try:
                    PG = build_path_graph(G, u, v)
                except EnumerationLimitError as e:
                    logger.warning("Tightness search skips a pair: %s", e)
                    continue
                far = farthest_pair(PG)
                if far is None:
                    continue
                S, T, diameter = far
                result.pairs_scanned += 1
                key = (diameter - 2 * d, diameter)
                if best_key is None or key > best_key:
                    best_key = key
                    result.diameter, result.distance = diameter, d
                    result.tight = diameter == 2 * d and d >= 2
                    result.graph = GraphDocument.from_graph(G)
                    result.u, result.v = u, v
                    result.S, result.T = list(S.vertices), list(T.vertices)
    return result


def search_tightness_witness(max_n: Optional[int] = None,
                             seed: Optional[int] = None,
                             show_progress: bool = False) -> TightnessResult:
    """
    Look for (G, u, v) whose path graph has diameter exactly 2 d_G(u, v) with d >= 2.

    Scans every 2-connected graph up to max_n (n = 8 adds seeded random samples,
    beyond the graph atlas) and keeps the pair maximising diameter - 2 d, then
    the diameter. Pairs with d_G(u, v) = 1 are considered only when no pair at
    distance 2 or more exists.
    """
    max_n = settings.TIGHTNESS_MAX_N if max_n is None else max_n
    seed = settings.SEED if seed is None else seed
    if max_n > TIGHTNESS_HARD_CAP:
        raise EnumerationLimitError(f"tightness search is capped at n = {TIGHTNESS_HARD_CAP} (got {max_n})")

    graphs = _tightness_graphs(max_n, seed)
    result = TightnessResult(max_n=max_n, graphs_scanned=len(graphs), pairs_scanned=0)
    result = _scan(graphs, 2, result, show_progress)
    if result.diameter is None:
        result = _scan(graphs, 1, result, show_progress)

    logger.info("Tightness search over %d graphs: best diameter %s at d = %s (tight: %s)",
                len(graphs), result.diameter, result.distance, result.tight)
    return result
