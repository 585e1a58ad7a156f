"""Index construction and bundle queries on a repository of edge cases."""

from __future__ import annotations

import hashlib
import json
import shutil
from pathlib import Path

import pytest

from vizrec.errors import BundleFormatError, UnknownFacet, UnknownWorkbook
from vizrec.models import tfidf_vector
from vizrec.recommender_service import build_index, load_bundle
from vizrec.similarity import Facet
from vizrec.text_pipeline import ALL_TEXT, Document, extract_tokens

THEME_A = ("pair_a", "pair_b", "related_one", "related_two", "related_three", "related_four")
THEME_B = ("other_one", "other_two", "other_three", "other_four")
RELATED_ONLY = ("related_one", "related_two", "related_three", "related_four")
EXCLUDED = ("non_english", "markless", "sparse")


def role_of(build):
    return {wid: role for role, wid in build["ids"].items()}


class TestBuildReport:
    def test_counts(self, mixed_build):
        report = mixed_build["report"]
        assert report["parsed"] == 13
        assert report["eligible"] == 10
        assert report["excluded"] == {
            "non_english": 1,
            "no_marks": 1,
            "too_few_words": 1,
        }
        assert report["column_documents"] == 10
        assert report["groups"] == 1
        assert report["tags"] == 30
        assert report["load_errors"] == []
        assert report["seed"] == 42

    def test_written_report_matches_returned(self, mixed_build):
        on_disk = json.loads(
            (mixed_build["bundle_dir"] / "report.json").read_text("utf-8")
        )
        assert on_disk == mixed_build["report"]


class TestExclusions:
    @pytest.mark.parametrize(
        "role,reason",
        [
            ("non_english", "non_english"),
            ("markless", "no_marks"),
            ("sparse", "too_few_words"),
        ],
    )
    def test_reason_recorded(self, mixed_build, role, reason):
        meta = mixed_build["bundle"].meta(mixed_build["ids"][role])
        assert not meta.eligible
        assert reason in meta.exclusion_reasons

    def test_eligible_workbooks_have_no_reasons(self, mixed_build):
        bundle = mixed_build["bundle"]
        for role in THEME_A + THEME_B:
            meta = bundle.meta(mixed_build["ids"][role])
            assert meta.eligible and meta.exclusion_reasons == ()

    def test_sparse_word_count_below_threshold(self, mixed_build):
        assert mixed_build["bundle"].meta(mixed_build["ids"]["sparse"]).word_count < 10

    def test_excluded_stay_browsable_but_unrecommended(self, mixed_build):
        bundle = mixed_build["bundle"]
        page_ids = {item["id"] for item in bundle.page(limit=100)["items"]}
        for role in EXCLUDED:
            wid = mixed_build["ids"][role]
            assert wid in page_ids
            for facet in Facet:
                assert wid not in bundle.neighbors[facet]
                assert bundle.recommend(wid, facet)["total"] == 0

    def test_neighbor_endpoints_are_eligible(self, mixed_build):
        bundle = mixed_build["bundle"]
        eligible = {
            wid for wid, meta in bundle.workbooks.items() if meta.eligible
        }
        for facet in Facet:
            for wid, listing in bundle.neighbors[facet].items():
                assert wid in eligible
                for neighbor_id, _ in listing.neighbors:
                    assert neighbor_id in eligible
                    assert neighbor_id in bundle.workbooks


class TestFacetSemantics:
    def test_scores_lie_in_their_band(self, mixed_build):
        bundle = mixed_build["bundle"]
        for facet in Facet:
            config = bundle.facet_configs[facet]
            for listing in bundle.neighbors[facet].values():
                for _, value in listing.neighbors:
                    assert config.contains(value), (facet, value)

    def test_neighbor_lists_sorted_descending(self, mixed_build):
        bundle = mixed_build["bundle"]
        for facet in Facet:
            for listing in bundle.neighbors[facet].values():
                values = [v for _, v in listing.neighbors]
                assert values == sorted(values, reverse=True)

    def test_versions_contains_exactly_the_planted_pair(self, mixed_build):
        bundle = mixed_build["bundle"]
        ids = mixed_build["ids"]
        pair_a, pair_b = ids["pair_a"], ids["pair_b"]
        versions = bundle.neighbors[Facet.VERSIONS]
        assert [n for n, _ in versions[pair_a].neighbors] == [pair_b]
        assert [n for n, _ in versions[pair_b].neighbors] == [pair_a]
        for role in RELATED_ONLY + THEME_B:
            assert versions[ids[role]].neighbors == ()

    def test_near_duplicates_are_not_also_related(self, mixed_build):
        bundle = mixed_build["bundle"]
        ids = mixed_build["ids"]
        related = bundle.neighbors[Facet.RELATED]
        a_neighbors = {n for n, _ in related[ids["pair_a"]].neighbors}
        b_neighbors = {n for n, _ in related[ids["pair_b"]].neighbors}
        assert ids["pair_b"] not in a_neighbors
        assert ids["pair_a"] not in b_neighbors
        assert a_neighbors  # still related to the rest of its theme

    def test_related_lists_stay_within_theme(self, mixed_build):
        bundle = mixed_build["bundle"]
        ids = mixed_build["ids"]
        theme_a_ids = {ids[r] for r in THEME_A}
        theme_b_ids = {ids[r] for r in THEME_B}
        for role in THEME_A:
            neighbors = {
                n for n, _ in bundle.neighbors[Facet.RELATED][ids[role]].neighbors
            }
            assert neighbors <= theme_a_ids, role
        for role in THEME_B:
            neighbors = {
                n for n, _ in bundle.neighbors[Facet.RELATED][ids[role]].neighbors
            }
            assert neighbors <= theme_b_ids, role

    def test_same_theme_workbooks_are_mutually_related(self, mixed_build):
        bundle = mixed_build["bundle"]
        ids = mixed_build["ids"]
        for role in RELATED_ONLY:
            neighbors = {
                n for n, _ in bundle.neighbors[Facet.RELATED][ids[role]].neighbors
            }
            expected = {ids[r] for r in RELATED_ONLY if r != role}
            assert expected <= neighbors, role

    def test_similar_data_puts_the_twin_first(self, mixed_build):
        bundle = mixed_build["bundle"]
        ids = mixed_build["ids"]
        listing = bundle.neighbors[Facet.SIMILAR_DATA][ids["pair_a"]]
        first_id, first_value = listing.neighbors[0]
        assert first_id == ids["pair_b"]
        assert first_value >= 0.99
        present = {n for n, _ in listing.neighbors}
        assert {ids[r] for r in RELATED_ONLY} <= present


class TestGroups:
    def test_single_group_with_latest_representative(self, mixed_build):
        bundle = mixed_build["bundle"]
        ids = mixed_build["ids"]
        (group,) = bundle.groups
        expected_members = tuple(sorted((ids["pair_a"], ids["pair_b"])))
        assert group.members == expected_members
        assert group.representative_id == ids["pair_b"]  # later modified date
        assert group.group_id == f"grp-{expected_members[0]}"

    def test_group_of_members_and_nonmembers(self, mixed_build):
        bundle = mixed_build["bundle"]
        ids = mixed_build["ids"]
        payload = bundle.group_of(ids["pair_a"])
        assert payload["representative_id"] == ids["pair_b"]
        assert {m["id"] for m in payload["members"]} == {
            ids["pair_a"],
            ids["pair_b"],
        }
        assert bundle.group_of(ids["related_one"]) is None


class TestTags:
    def test_table_is_bounded_and_sorted(self, mixed_build):
        bundle = mixed_build["bundle"]
        assert 0 < len(bundle.tags) <= 30
        pairs = [(t.weight, t.tag) for t in bundle.tags]
        assert pairs == sorted(pairs, key=lambda wt: (-wt[0], wt[1]))
        for entry in bundle.tags:
            assert entry.weight > 0
            assert entry.workbook_ids
            for wid in entry.workbook_ids:
                assert wid in bundle.workbooks

    def test_tag_workbooks_resolves_cards(self, mixed_build):
        bundle = mixed_build["bundle"]
        entry = bundle.tags[0]
        cards = bundle.tag_workbooks(entry.tag)
        assert [c["id"] for c in cards] == list(entry.workbook_ids)
        assert bundle.tag_workbooks("zzznotatag") == []

    def test_excluded_workbooks_remain_indexed(self, mixed_build):
        bundle = mixed_build["bundle"]
        hits = bundle.tag_workbooks("umsatz")
        assert [c["id"] for c in hits] == [mixed_build["ids"]["non_english"]]


class TestPagination:
    def test_first_page_lists_everything_sorted(self, mixed_build):
        page = mixed_build["bundle"].page()
        assert page["total"] == 13
        ids = [item["id"] for item in page["items"]]
        assert ids == sorted(ids)
        assert len(ids) == 13  # default limit 24 covers the whole corpus

    def test_offset_and_limit_slice(self, mixed_build):
        bundle = mixed_build["bundle"]
        full = [item["id"] for item in bundle.page(limit=100)["items"]]
        window = bundle.page(offset=5, limit=4)
        assert [item["id"] for item in window["items"]] == full[5:9]
        assert (window["offset"], window["limit"]) == (5, 4)

    def test_limits_clamp(self, mixed_build):
        bundle = mixed_build["bundle"]
        assert bundle.page(limit=1000)["limit"] == 100
        assert bundle.page(limit=0)["limit"] == 1
        assert bundle.page(offset=-5)["offset"] == 0

    def test_recommendations_paginate(self, mixed_build):
        bundle = mixed_build["bundle"]
        wid = mixed_build["ids"]["related_one"]
        full = bundle.recommend(wid, "related", limit=100)
        first = bundle.recommend(wid, "related", limit=1)
        second = bundle.recommend(wid, "related", limit=1, offset=1)
        assert first["total"] == full["total"] >= 2
        assert first["items"][0] == full["items"][0]
        assert second["items"][0] == full["items"][1]


class TestSearch:
    def test_author_matches_come_first(self, mixed_build):
        bundle = mixed_build["bundle"]
        ids = mixed_build["ids"]
        results = bundle.search("Brook")
        pair_ids = sorted((ids["pair_a"], ids["pair_b"])  )
        assert [r["workbook"]["id"] for r in results[:2]] == pair_ids
        for row in results[:2]:
            assert row["match"] == "author" and row["score"] == 1.0

    def test_author_prefix_is_case_insensitive(self, mixed_build):
        bundle = mixed_build["bundle"]
        assert bundle.search("brook chandler")[:2] == bundle.search("Brook")[:2]

    def test_text_ranking_matches_brute_force(self, mixed_build):
        bundle = mixed_build["bundle"]
        doc = bundle.documents["all_text"][mixed_build["ids"]["related_one"]]
        query = " ".join(sorted(doc.counts)[:3])
        expected = self.brute_force(bundle, query)
        results = bundle.search(query, limit=100)
        assert [r["workbook"]["id"] for r in results] == [wid for wid, _ in expected]
        for row, (_, score) in zip(results, expected):
            assert row["score"] == pytest.approx(score, abs=1e-9)
            assert row["match"] == "text"

    @staticmethod
    def brute_force(bundle, query):
        counts: dict = {}
        for token in extract_tokens(query, bundle.stop_words):
            counts[token] = counts.get(token, 0) + 1
        pseudo = Document("#q", ALL_TEXT, counts, sum(counts.values()), len(counts))
        query_vec = tfidf_vector(bundle.tfidf, pseudo)
        rows = []
        for wid, doc in bundle.documents["all_text"].items():
            if not doc.counts:
                continue
            vec = tfidf_vector(bundle.tfidf, doc)
            if vec.nnz == 0:
                continue
            score = float(query_vec.dot(vec))  # both are unit vectors
            if score > 0.0:
                rows.append((wid, min(1.0, score)))
        rows.sort(key=lambda pair: (-pair[1], pair[0]))
        return rows

    def test_excluded_workbook_reachable_by_its_text(self, mixed_build):
        results = mixed_build["bundle"].search("Gesamt")
        assert [r["workbook"]["id"] for r in results] == [
            mixed_build["ids"]["non_english"]
        ]
        assert results[0]["match"] == "text"

    def test_empty_and_stopword_queries(self, mixed_build):
        bundle = mixed_build["bundle"]
        assert bundle.search("") == []
        assert bundle.search("the of and") == []

    def test_limit_respected(self, mixed_build):
        assert len(mixed_build["bundle"].search("Brook", limit=1)) == 1


class TestDetail:
    def test_quick_view_payload(self, mixed_build):
        bundle = mixed_build["bundle"]
        ids = mixed_build["ids"]
        payload = bundle.detail(ids["pair_a"])
        assert set(payload) == {"workbook", "recommendations", "group"}
        assert payload["workbook"]["id"] == ids["pair_a"]
        assert set(payload["recommendations"]) == {
            "related",
            "versions",
            "similar-data",
        }
        versions_head = payload["recommendations"]["versions"]
        assert versions_head[0]["workbook"]["id"] == ids["pair_b"]
        assert len(payload["recommendations"]["related"]) <= 5
        assert payload["group"]["representative_id"] == ids["pair_b"]

    def test_unknown_ids_and_facets(self, mixed_build):
        bundle = mixed_build["bundle"]
        with pytest.raises(UnknownWorkbook):
            bundle.meta("nonexistent")
        with pytest.raises(UnknownWorkbook):
            bundle.detail("nonexistent")
        with pytest.raises(UnknownWorkbook):
            bundle.recommend("nonexistent", "related")
        with pytest.raises(UnknownFacet):
            bundle.recommend(mixed_build["ids"]["pair_a"], "bogus-facet")


class TestDocumentsConsistency:
    def test_column_tokens_are_a_pointwise_subset(self, mixed_build):
        documents = mixed_build["bundle"].documents
        for wid, col_doc in documents["columns_only"].items():
            full = documents["all_text"][wid].counts
            for token, count in col_doc.counts.items():
                assert full.get(token, 0) >= count, (wid, token)

    def test_word_count_matches_document(self, mixed_build):
        bundle = mixed_build["bundle"]
        for wid, meta in bundle.workbooks.items():
            assert meta.word_count == bundle.documents["all_text"][wid].total_tokens


BUNDLE_FILES = [
    "workbooks.jsonl",
    "documents_all_text.jsonl",
    "documents_columns_only.jsonl",
    "models/tfidf.bin",
    "models/lda_all_text.bin",
    "models/lda_columns_only.bin",
    "neighbors_related.jsonl",
    "neighbors_versions.jsonl",
    "neighbors_similar_data.jsonl",
    "groups.jsonl",
    "tags.json",
    "inverted_index.json",
    "stopwords.txt",
]


def file_hashes(root: Path) -> dict:
    return {
        str(p.relative_to(root).as_posix()): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestPersistence:
    def test_layout_and_manifest(self, mixed_build):
        root = mixed_build["bundle_dir"]
        for rel in BUNDLE_FILES + ["manifest.json", "report.json"]:
            assert (root / rel).is_file(), rel
        manifest = json.loads((root / "manifest.json").read_text("utf-8"))
        assert manifest["format_version"] == 1
        assert manifest["seed"] == 42
        assert sorted(manifest["checksums"]) == sorted(BUNDLE_FILES)
        assert manifest["facets"]["related"] == {
            "low": 0.65,
            "high": 0.90,
            "profile": "all_text",
        }
        assert manifest["facets"]["versions"]["profile"] == "all_text"
        assert manifest["facets"]["similar-data"]["profile"] == "columns_only"
        assert manifest["counts"] == {"workbooks": 13, "eligible": 10, "groups": 1}

    def test_loaded_bundle_answers_identically(self, mixed_build):
        bundle = mixed_build["bundle"]
        loaded = load_bundle(mixed_build["bundle_dir"])
        assert loaded.page(limit=100) == bundle.page(limit=100)
        assert loaded.tag_table() == bundle.tag_table()
        wid = mixed_build["ids"]["pair_a"]
        for facet in ("related", "versions", "similar-data"):
            assert loaded.recommend(wid, facet) == bundle.recommend(wid, facet)
        assert loaded.detail(wid) == bundle.detail(wid)
        assert loaded.group_of(wid) == bundle.group_of(wid)
        assert loaded.search("Brook") == bundle.search("Brook")
        query = " ".join(sorted(bundle.documents["all_text"][wid].counts)[:3])
        assert loaded.search(query) == bundle.search(query)

    def test_rebuild_is_byte_identical(self, mixed_build, tmp_path):
        config = mixed_build["config"]
        repo = mixed_build["repo"]
        build_index(str(repo), config, output_path=str(tmp_path / "again"))
        assert file_hashes(tmp_path / "again") == file_hashes(
            mixed_build["bundle_dir"]
        )

    def test_corrupted_file_detected(self, mixed_build, tmp_path):
        copy = tmp_path / "tampered"
        shutil.copytree(mixed_build["bundle_dir"], copy)
        target = copy / "tags.json"
        raw = bytearray(target.read_bytes())
        raw[len(raw) // 2] ^= 0xFF
        target.write_bytes(bytes(raw))
        with pytest.raises(BundleFormatError) as excinfo:
            load_bundle(copy)
        assert "tags.json" in str(excinfo.value)

    def test_missing_file_detected(self, mixed_build, tmp_path):
        copy = tmp_path / "incomplete"
        shutil.copytree(mixed_build["bundle_dir"], copy)
        (copy / "groups.jsonl").unlink()
        with pytest.raises(BundleFormatError):
            load_bundle(copy)

    def test_unsupported_version_rejected(self, mixed_build, tmp_path):
        copy = tmp_path / "futuristic"
        shutil.copytree(mixed_build["bundle_dir"], copy)
        manifest = json.loads((copy / "manifest.json").read_text("utf-8"))
        manifest["format_version"] = 999
        (copy / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
        with pytest.raises(BundleFormatError):
            load_bundle(copy)

    def test_directory_without_manifest_rejected(self, tmp_path):
        with pytest.raises(BundleFormatError):
            load_bundle(tmp_path)


class TestMinHashPrefilter:
    def test_prefilter_keeps_the_planted_pair(self, mixed_build, tmp_path):
        from dataclasses import replace

        config = replace(mixed_build["config"], minhash_prefilter=True)
        bundle, report = build_index(str(mixed_build["repo"]), config)
        ids = mixed_build["ids"]
        versions = bundle.neighbors[Facet.VERSIONS]
        assert [n for n, _ in versions[ids["pair_a"]].neighbors] == [ids["pair_b"]]
        assert report["groups"] == 1
        (group,) = bundle.groups
        assert group.members == tuple(sorted((ids["pair_a"], ids["pair_b"])))
        # the related facet is unaffected by the versions-only prefilter
        related = {
            wid: listing.neighbors
            for wid, listing in mixed_build["bundle"]
            .neighbors[Facet.RELATED]
            .items()
        }
        assert {
            wid: listing.neighbors
            for wid, listing in bundle.neighbors[Facet.RELATED].items()
        } == related
