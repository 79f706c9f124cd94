import numpy as np
import pytest

import plkg
from plkg.agreement import cohen_kappa, percent_agreement, union_node_set

from conftest import make_annotation

NODE = "edge.clarity.hard"
OTHER = "edge.clarity.soft"


def corpus(schema, presence, annotator, node=NODE):
    """One single-node annotation per item; presence[i] controls the node."""
    return [
        make_annotation(
            schema, [node] if present else [],
            ann_id=f"{annotator}-{i}", image_ref=f"img-{i}.png", annotator_id=annotator,
        )
        for i, present in enumerate(presence)
    ]


class TestKappa:
    def test_hand_computed_two_by_two_table(self, schema):
        # 10 items: both say yes on 4, both no on 4, one disagreement each
        # way. po = 8/10, marginals 0.5/0.5, pe = 0.5, kappa = 0.6.
        a = corpus(schema, [1, 1, 1, 1, 1, 0, 0, 0, 0, 0], "a")
        b = corpus(schema, [1, 1, 1, 1, 0, 1, 0, 0, 0, 0], "b")
        report = cohen_kappa(a, b, {NODE})
        agr = report.per_node[NODE]
        assert agr.observed_po == pytest.approx(0.8, abs=1e-12)
        assert agr.chance_pe == pytest.approx(0.5, abs=1e-12)
        assert agr.kappa == pytest.approx(0.6, abs=1e-12)
        assert report.macro_kappa == pytest.approx(0.6, abs=1e-12)

    def test_self_agreement_is_one(self, schema, examples):
        nodes = union_node_set(examples)
        report = cohen_kappa(examples, examples, nodes)
        for agr in report.per_node.values():
            if agr.kappa is not None:
                assert agr.kappa == pytest.approx(1.0)
        assert report.macro_kappa == pytest.approx(1.0)

    def test_degenerate_marginals_omit_kappa(self, schema):
        # Node present for every item on both sides: pe = 1, kappa undefined.
        a = corpus(schema, [1, 1, 1], "a")
        b = corpus(schema, [1, 1, 1], "b")
        report = cohen_kappa(a, b, {NODE})
        assert report.per_node[NODE].kappa is None
        assert report.macro_kappa is None

    def test_systematic_disagreement_negative(self, schema):
        a = corpus(schema, [1, 0, 1, 0], "a")
        b = corpus(schema, [0, 1, 0, 1], "b")
        report = cohen_kappa(a, b, {NODE})
        assert report.per_node[NODE].kappa == pytest.approx(-1.0)

    def test_disjoint_label_sets_kappa_nonpositive(self, schema):
        a = corpus(schema, [1, 1, 0, 0], "a", node=NODE)
        b = corpus(schema, [0, 0, 1, 1], "b", node=OTHER)
        report = cohen_kappa(a, b, {NODE, OTHER})
        for agr in report.per_node.values():
            assert agr.kappa is None or agr.kappa <= 0

    def test_random_simulation_macro_near_zero(self, schema):
        # Independent coin flips over 10,000 items: kappa concentrates at 0.
        rng = np.random.default_rng(2026)
        n = 10_000
        flips_a = rng.random(n) < 0.3
        flips_b = rng.random(n) < 0.3
        a = corpus(schema, flips_a, "a")
        b = corpus(schema, flips_b, "b")
        report = cohen_kappa(a, b, {NODE})
        assert -0.05 <= report.macro_kappa <= 0.05


class TestAlignment:
    def test_misaligned_image_sets_rejected(self, schema):
        a = corpus(schema, [1, 0], "a")
        b = corpus(schema, [1], "b")
        with pytest.raises(plkg.MisalignedCorpora):
            cohen_kappa(a, b, {NODE})

    def test_duplicate_image_rejected(self, schema):
        a = corpus(schema, [1], "a") * 2
        b = corpus(schema, [1, 0], "b")
        with pytest.raises(plkg.MisalignedCorpora):
            cohen_kappa(a, b, {NODE})

    def test_empty_corpora_rejected(self, schema):
        with pytest.raises(plkg.MisalignedCorpora):
            cohen_kappa([], [], {NODE})


class TestPercentAgreement:
    def test_matches_kappa_po(self, schema):
        a = corpus(schema, [1, 1, 0, 0], "a")
        b = corpus(schema, [1, 0, 0, 1], "b")
        pa = percent_agreement(a, b, {NODE})
        report = cohen_kappa(a, b, {NODE})
        assert pa[NODE] == report.per_node[NODE].observed_po == 0.5


class TestReportShape:
    def test_to_dict_sorted_and_json_stable(self, schema):
        a = corpus(schema, [1, 0], "a")
        b = corpus(schema, [1, 1], "b")
        report = cohen_kappa(a, b, {NODE, OTHER, "comp"})
        d = report.to_dict()
        assert list(d["per_node"]) == sorted(d["per_node"])
        assert d["n_items"] == 2

    def test_to_text_has_macro_row(self, schema):
        a = corpus(schema, [1, 0], "a")
        b = corpus(schema, [1, 0], "b")
        text = cohen_kappa(a, b, {NODE}).to_text()
        assert "macro" in text

    def test_union_node_set(self, schema, examples):
        nodes = union_node_set(examples)
        assert "space.linear.western.one-point" in nodes
        assert "space.linear.chinese.three-distances.high" in nodes
