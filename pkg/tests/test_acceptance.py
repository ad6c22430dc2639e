"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Oracles here are written independently of the library code paths
they check (naive rescans, exhaustive enumeration, full-vector cosine).
"""

import itertools
import math
import random
import time
from collections import Counter

import pytest
from click.testing import CliRunner

from latentsearch.cli import main as cli_main
from latentsearch.engine import SearchEngine
from latentsearch.evaluation import (
    SigTestResult,
    average_precision,
    interpolate_11pt,
    pr_points,
    randomization_test,
)
from latentsearch.expansion import expand_query_csa, expand_query_qocsa
from latentsearch.indexing import Document, build_index, read_corpus
from latentsearch.ranking import QueryVector, search, weight_query
from latentsearch.textproc import analyze

THAILAND_QUERY = "cities that are tourist destinations of Thailand"
MARION_QUERY = "Where is the actress, Marion Davies, buried?"


def ok(line: str) -> None:
    print(f"\nACCEPTANCE {line}")


# -----------------------------------------------------------------------------

def test_criterion_1_thailand_activation_sets(fixture_ontology):
    start = time.perf_counter()
    qocsa = expand_query_qocsa(THAILAND_QUERY, fixture_ontology)
    csa = expand_query_csa(THAILAND_QUERY, fixture_ontology)
    elapsed = time.perf_counter() - start

    assert {a.main_alias for a in qocsa.activated} == {"Bangkok", "Chiang Mai"}
    assert {a.entity_id for a in qocsa.activated} == {"#Bangkok", "#Chiang_Mai"}
    assert {a.main_alias for a in csa.activated} == {
        "Bangkok", "Southeast Asia", "Chiang Mai", "Temple of Golden Buddha"}
    assert elapsed < 1.0
    ok(f"1 PASS: Thailand fixture activates exactly the expected sets "
       f"({elapsed * 1000:.0f} ms)")


def test_criterion_2_marion_davies_pipeline(fixture_ontology):
    result = expand_query_qocsa(MARION_QUERY, fixture_ontology)
    forms = [(f.initial_entity, f.relation, f.target_class) for f in result.forms]
    assert forms == [("#Marion_Davies", "buriedIn", "Location")]
    assert [a.entity_id for a in result.activated] == ["#Hollywood_Cemetery"]
    assert "Hollywood Cemetery" in result.expanded_text
    ok("2 PASS: Marion Davies pipeline yields the buriedIn form, activates "
       "#Hollywood_Cemetery, and expands with 'Hollywood Cemetery'")


def test_criterion_3_tail_count_arithmetic():
    first = SigTestResult.from_counts(2129, 2402, 100_000)
    second = SigTestResult.from_counts(1710, 1664, 100_000)
    assert round(first.p_two_sided, 5) == 0.04531
    assert round(second.p_two_sided, 5) == 0.03374
    ok("3 PASS: tail counts reproduce p=0.04531 and p=0.03374 exactly")


def _enumeration_oracle(diffs):
    n = len(diffs)
    observed = sum(diffs) / n
    bound = abs(observed)
    n_plus = n_minus = 0
    for signs in itertools.product((1.0, -1.0), repeat=n):
        d = sum(s * x for s, x in zip(signs, diffs)) / n
        if d >= bound:
            n_plus += 1
        elif d <= -bound:
            n_minus += 1
    return n_minus, n_plus, (n_minus + n_plus) / 2 ** n


def test_criterion_4_randomization_exactness():
    rng = random.Random(20130415)
    worst_gap = 0.0
    for n in (1, 2, 3, 5, 10):
        ap_a = [rng.random() for _ in range(n)]
        ap_b = [rng.random() for _ in range(n)]
        n_minus, n_plus, p_exact = _enumeration_oracle(
            [a - b for a, b in zip(ap_a, ap_b)])

        exhaustive = randomization_test(ap_a, ap_b, trials=100_000, seed=1)
        assert exhaustive.exhaustive
        assert (exhaustive.n_minus, exhaustive.n_plus) == (n_minus, n_plus)
        assert exhaustive.p_two_sided == p_exact

        sampled = randomization_test(ap_a, ap_b, trials=100_000, seed=1,
                                     exhaustive=False)
        gap = abs(sampled.p_two_sided - p_exact)
        worst_gap = max(worst_gap, gap)
        assert gap <= 0.01
    ok(f"4 PASS: sampled p within 0.01 of exhaustive on n<=10 instances "
       f"(worst gap {worst_gap:.4f}); exhaustive matches enumeration exactly")


def _oracle_ap(ranked, relevant):
    # naive rescan: precision at each relevant rank computed from scratch
    total = 0.0
    for k, doc in enumerate(ranked, start=1):
        if doc in relevant:
            hits_at_k = sum(1 for d in ranked[:k] if d in relevant)
            total += hits_at_k / k
    return total / len(relevant)


def _oracle_curve(ranked, relevant):
    best = []
    for i in range(11):
        level = i / 10
        candidates = []
        for k in range(1, len(ranked) + 1):
            hits = sum(1 for d in ranked[:k] if d in relevant)
            recall = hits / len(relevant)
            if recall >= level:
                candidates.append(hits / k)
        best.append(max(candidates) if candidates else 0.0)
    return best


def test_criterion_5_interpolation_and_ap_oracle():
    rng = random.Random(99)
    for _ in range(200):
        n_docs = rng.randint(1, 50)
        doc_ids = [f"d{i}" for i in range(n_docs)]
        relevant = set(rng.sample(doc_ids, k=rng.randint(1, min(10, n_docs))))
        ranked = rng.sample(doc_ids, k=rng.randint(1, n_docs))

        ap = average_precision(ranked, relevant)
        assert ap == pytest.approx(_oracle_ap(ranked, relevant), abs=1e-9)

        curve = interpolate_11pt(pr_points(ranked, relevant))
        oracle = _oracle_curve(ranked, relevant)
        for got, expected in zip(curve.precision, oracle):
            assert got == pytest.approx(expected, abs=1e-9)
        assert all(curve.precision[i] >= curve.precision[i + 1]
                   for i in range(10))
        assert curve.f_measure[0] == 0.0
    ok("5 PASS: 200 random ranked lists match the brute-force AP and "
       "interpolation oracle to 1e-9; curves monotone; F(0)=0")


def test_criterion_6_cosine_ranking_oracle():
    rng = random.Random(424242)
    vocab = [f"word{i}" for i in range(12)]
    corpus = {f"doc{i:02d}": " ".join(rng.choices(vocab, k=rng.randint(3, 25)))
              for i in range(20)}
    index = build_index(Document(d, t) for d, t in sorted(corpus.items()))

    for trial in range(10):
        query_terms = rng.choices(vocab, k=rng.randint(1, 5))
        vector = weight_query(query_terms, index)
        hits = search(vector, index)

        # oracle: full document vectors, direct cosine over every document
        expected = []
        for doc_id, text in corpus.items():
            weights = {}
            for term, tf in Counter(analyze(text)).items():
                w = tf * math.log10(index.doc_count / index.doc_freq[term])
                if w > 0:
                    weights[term] = w
            if not weights or not vector.weights:
                continue
            dot = sum(w * vector.weights.get(t, 0.0) for t, w in weights.items())
            norm = math.sqrt(sum(w * w for w in weights.values()))
            score = dot / (norm * vector.norm)
            if score > 0:
                expected.append((doc_id, score))
        expected.sort(key=lambda r: (-r[1], r[0]))

        assert [h.doc_id for h in hits] == [d for d, _ in expected]
        for hit, (_, score) in zip(hits, expected):
            assert hit.score == pytest.approx(score, abs=1e-9)

        # positive scaling of the query weights must not change anything
        for alpha in (0.125, 9.5):
            scaled_weights = {t: alpha * w for t, w in vector.weights.items()}
            scaled = QueryVector(
                weights=scaled_weights,
                norm=math.sqrt(sum(w * w for w in scaled_weights.values())))
            rescored = search(scaled, index)
            assert [h.doc_id for h in rescored] == [h.doc_id for h in hits]
            for a, b in zip(rescored, hits):
                assert a.score == pytest.approx(b.score, rel=1e-9)
    ok("6 PASS: 20-doc corpus ranking matches exhaustive cosine to 1e-9 "
       "and is invariant under query scaling")


def test_criterion_7_expansion_improves_fixture_retrieval(
        fixture_index, fixture_ontology, fixtures_dir):
    assert fixture_index.doc_count <= 30
    relevant = {"r1.txt", "r2.txt", "r3.txt"}
    for doc in read_corpus(fixtures_dir / "corpus"):
        if doc.doc_id in relevant:
            text = doc.raw_text.lower()
            assert "chiang mai" in text
            assert "thailand" not in text

    engine = SearchEngine(index=fixture_index, ontology=fixture_ontology)
    start = time.perf_counter()
    ap = {}
    for method in ("syntactic", "csa", "qocsa"):
        _, hits = engine.search(THAILAND_QUERY, method=method)
        ap[method] = average_precision([h.doc_id for h in hits], relevant)
    elapsed = time.perf_counter() - start

    assert ap["qocsa"] > ap["syntactic"]
    assert ap["csa"] < ap["qocsa"]
    assert ap["syntactic"] > ap["csa"]
    assert elapsed < 5.0
    ok(f"7 PASS: MAP ordering qocsa={ap['qocsa']:.4f} > "
       f"syntactic={ap['syntactic']:.4f} > csa={ap['csa']:.4f} "
       f"({elapsed * 1000:.0f} ms)")


def _run_pipeline(workdir, fixtures_dir):
    """Index, search all three models, evaluate, sigtest, plot:
    returns {relative_name: bytes} plus captured stdout per step."""
    runner = CliRunner()
    outputs = {}
    stdout = []

    def run(args):
        result = runner.invoke(cli_main, args)
        assert result.exit_code == 0, result.output
        # paths differ between the two workdirs by construction; the rest
        # of the output must be identical
        stdout.append(result.output.replace(str(workdir), "WORKDIR"))

    index = workdir / "fixture.idx"
    run(["index", str(fixtures_dir / "corpus"), str(index)])
    queries = fixtures_dir / "queries.tsv"
    ontology = fixtures_dir / "ontology.tsv"
    qrels = fixtures_dir / "qrels.txt"
    for method in ("syntactic", "csa", "qocsa"):
        run_path = workdir / f"{method}.run"
        args = ["search", str(index), str(queries), str(run_path),
                "--method", method]
        if method != "syntactic":
            args += ["--ontology", str(ontology)]
        run(args)
    run(["eval", str(qrels), str(workdir / "qocsa.run"),
         "--ap-csv", str(workdir / "ap.csv"),
         "--curve-csv", str(workdir / "curve.csv")])
    run(["eval", str(qrels), str(workdir / "qocsa.run"),
         str(workdir / "syntactic.run"), str(workdir / "csa.run")])
    run(["sigtest", str(qrels), str(workdir / "qocsa.run"),
         str(workdir / "syntactic.run"), "--trials", "1000", "--seed", "42"])
    run(["plot-data", str(qrels), str(workdir / "qocsa.run"),
         str(workdir / "syntactic.run"), str(workdir / "csa.run"),
         "--out", str(workdir / "plot.csv")])

    for path in sorted(workdir.iterdir()):
        outputs[path.name] = path.read_bytes()
    return outputs, stdout


def test_criterion_8_end_to_end_determinism(tmp_path, fixtures_dir):
    dir_a = tmp_path / "first"
    dir_b = tmp_path / "second"
    dir_a.mkdir()
    dir_b.mkdir()
    files_a, stdout_a = _run_pipeline(dir_a, fixtures_dir)
    files_b, stdout_b = _run_pipeline(dir_b, fixtures_dir)
    assert files_a.keys() == files_b.keys()
    for name in files_a:
        assert files_a[name] == files_b[name], f"{name} differs between runs"
    assert stdout_a == stdout_b
    ok(f"8 PASS: {len(files_a)} pipeline artifacts byte-identical across "
       "repeated runs with fixed seeds")
