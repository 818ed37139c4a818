import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branch.dataset import (
    MISSING,
    Kind,
    Label,
    dataset_from_json,
    dataset_to_csv,
    dataset_to_json,
    parse_csv,
    percentage_split,
    search_features,
)
from branch.errors import BadClassColumn, BadFraction, EmptyDataset, MalformedCsv, TooFewSamples
from branch.rng import SplitMix64

from conftest import make_dataset, random_dataset


class TestParseCsv:
    def test_mixed_kinds_and_missing(self):
        text = "g1,g2,cls\n1.5,a,cancer\n2.0,b,normal\nNA,a,cancer\n"
        d = parse_csv(text, "cls", "cancer")
        g1, g2 = d.features
        assert g1.kind is Kind.NUMERIC and g1.categories == ()
        assert g2.kind is Kind.CATEGORICAL and g2.categories == ("a", "b")
        assert d.samples[2].values[0] is MISSING
        assert [s.label for s in d.samples] == [Label.POSITIVE, Label.NEGATIVE, Label.POSITIVE]
        assert d.labeling.negative_name == "normal"

    def test_single_class_rejected(self):
        with pytest.raises(BadClassColumn):
            parse_csv("x,cls\n1,yes\n2,yes\n", "cls", "yes")

    def test_single_numeric_column(self):
        d = parse_csv("v,cls\n1,p\n2,n\n3,p\n4,n\n", "cls", "p")
        assert d.features[0].kind is Kind.NUMERIC
        assert len(d.samples) == 4

    def test_ragged_rows(self):
        with pytest.raises(MalformedCsv):
            parse_csv("a,b,cls\n1,2,p\n1,n\n", "cls", "p")

    def test_missing_class_cell(self):
        with pytest.raises(BadClassColumn):
            parse_csv("a,cls\n1,p\n2,\n3,n\n", "cls", "p")

    def test_three_class_values(self):
        with pytest.raises(BadClassColumn):
            parse_csv("a,cls\n1,p\n2,n\n3,x\n", "cls", "p")

    def test_positive_absent(self):
        with pytest.raises(BadClassColumn):
            parse_csv("a,cls\n1,p\n2,n\n", "cls", "zzz")

    def test_unknown_class_column(self):
        with pytest.raises(BadClassColumn):
            parse_csv("a,cls\n1,p\n2,n\n", "klass", "p")

    def test_empty_input(self):
        with pytest.raises(EmptyDataset):
            parse_csv("", "cls", "p")
        with pytest.raises(EmptyDataset):
            parse_csv("a,cls\n", "cls", "p")

    def test_no_feature_columns(self):
        with pytest.raises(EmptyDataset):
            parse_csv("cls\np\nn\n", "cls", "p")

    def test_quoted_fields(self):
        d = parse_csv('name,cls\n"x, y",p\nplain,n\n', "cls", "p")
        assert d.features[0].categories == ("x, y", "plain")

    def test_na_is_case_sensitive(self):
        d = parse_csv("a,cls\nna,p\nNA,n\nx,p\n", "cls", "p")
        # lowercase 'na' is a real category, uppercase 'NA' is missing
        assert d.features[0].kind is Kind.CATEGORICAL
        assert d.features[0].categories == ("na", "x")
        assert d.samples[1].values[0] is MISSING

    def test_one_bad_cell_makes_column_categorical(self):
        d = parse_csv("a,cls\n1,p\n2,n\noops,p\n", "cls", "p")
        assert d.features[0].kind is Kind.CATEGORICAL
        assert d.features[0].categories == ("1", "2", "oops")

    def test_reparse_serialized_csv_is_identical(self, rng):
        d = random_dataset(rng, n=25)
        text = dataset_to_csv(d)
        d2 = parse_csv(text, "class", d.labeling.positive_name)
        assert [f.kind for f in d2.features] == [f.kind for f in d.features]
        for f2, f in zip(d2.features, d.features):
            assert set(f2.categories) <= set(f.categories)
        assert [s.label for s in d2.samples] == [s.label for s in d.samples]
        assert d2.signature == d.signature

    def test_signature_invariant_under_column_order(self):
        a = parse_csv("x,y,cls\n1,a,p\n2,b,n\n", "cls", "p")
        b = parse_csv("y,x,cls\na,1,p\nb,2,n\n", "cls", "p")
        assert a.signature == b.signature

    def test_signature_sensitive_to_kind_and_classes(self):
        a = parse_csv("x,cls\n1,p\n2,n\n", "cls", "p")
        b = parse_csv("x,cls\n1,p\nzz,n\n", "cls", "p")  # x becomes categorical
        c = parse_csv("x,cls\n1,p\n2,other\n", "cls", "p")
        assert a.signature != b.signature
        assert a.signature != c.signature


class TestPercentageSplit:
    def test_stratified_counts_half(self):
        d = make_dataset([[i] for i in range(10)], [True] * 6 + [False] * 4)
        part = percentage_split(d, 0.5, seed=99)
        train_pos = sum(1 for i in part.train_indices if d.samples[i].label is Label.POSITIVE)
        train_neg = len(part.train_indices) - train_pos
        assert train_pos == 3 and train_neg == 2

    def test_stratified_counts_seventy(self):
        d = make_dataset([[i] for i in range(10)], [True] * 6 + [False] * 4)
        part = percentage_split(d, 0.7, seed=1)
        assert len(part.train_indices) == 7  # round(4.2)=4 pos, round(2.8)=3 neg

    def test_deterministic(self):
        d = make_dataset([[i] for i in range(10)], [True] * 6 + [False] * 4)
        a = percentage_split(d, 0.5, seed=42)
        b = percentage_split(d, 0.5, seed=42)
        assert a.train_indices == b.train_indices
        assert a.test_indices == b.test_indices

    def test_partition_and_stratification_properties(self):
        rng = random.Random(7)
        for _ in range(50):
            n_pos = rng.randrange(2, 20)
            n_neg = rng.randrange(2, 20)
            d = make_dataset([[i] for i in range(n_pos + n_neg)],
                             [True] * n_pos + [False] * n_neg)
            fraction = rng.uniform(0.05, 0.95)
            part = percentage_split(d, fraction, seed=rng.randrange(2**63))
            all_idx = sorted(part.train_indices + part.test_indices)
            assert all_idx == list(range(n_pos + n_neg))
            assert not set(part.train_indices) & set(part.test_indices)
            for label, count in ((Label.POSITIVE, n_pos), (Label.NEGATIVE, n_neg)):
                k = sum(1 for i in part.train_indices if d.samples[i].label is label)
                import math
                want = min(max(math.floor(fraction * count + 0.5), 1), count - 1)
                assert k == want

    @given(fraction=st.floats(0.01, 0.99), seed=st.integers(0, 2**64 - 1),
           n_pos=st.integers(2, 12), n_neg=st.integers(2, 12))
    @settings(max_examples=60, deadline=None)
    def test_partition_property_hypothesis(self, fraction, seed, n_pos, n_neg):
        d = make_dataset([[i] for i in range(n_pos + n_neg)],
                         [True] * n_pos + [False] * n_neg)
        part = percentage_split(d, fraction, seed)
        assert sorted(part.train_indices + part.test_indices) == list(range(n_pos + n_neg))
        assert not set(part.train_indices) & set(part.test_indices)

    def test_bad_fraction(self):
        d = make_dataset([[1], [2]], [True, False])
        for fraction in (0.0, 1.0, -0.5, 1.5, float("nan")):
            with pytest.raises(BadFraction):
                percentage_split(d, fraction, seed=1)

    def test_single_sample_class_goes_to_train_with_warning(self):
        d = make_dataset([[1], [2], [3], [4]], [True, False, False, False])
        part = percentage_split(d, 0.5, seed=3)
        assert 0 in part.train_indices
        assert part.warnings and "single sample" in part.warnings[0]

    def test_zero_sample_class_raises(self):
        d = make_dataset([[1], [2]], [True, False])
        one_class = make_dataset([[1], [2]], [True, True])
        with pytest.raises(TooFewSamples):
            percentage_split(one_class, 0.5, seed=1)
        percentage_split(d, 0.5, seed=1)  # sanity: two-class survives


class TestSearchFeatures:
    def setup_method(self):
        self.d = make_dataset([[1, 2, 3]], [True],
                              feature_names=["PSRC1", "SRC", "TP53"])

    def test_position_then_name(self):
        names = [f.name for f in search_features(self.d, "src")]
        assert names == ["SRC", "PSRC1"]

    def test_empty_query_gives_all_in_name_order(self):
        names = [f.name for f in search_features(self.d, "")]
        assert names == ["PSRC1", "SRC", "TP53"]

    def test_no_match(self):
        assert search_features(self.d, "zzz") == []


class TestJsonMirror:
    def test_round_trip(self, rng):
        d = random_dataset(rng, n=15)
        doc = dataset_to_json(d)
        d2 = dataset_from_json(doc)
        assert d2 == d
        assert d2.signature == d.signature

    def test_missing_serialized_as_null(self):
        d = make_dataset([[None, "a"]], [True])
        doc = dataset_to_json(d)
        assert doc["rows"][0][0] is None


class TestSplitMix64:
    def test_reference_stream(self):
        # splitmix64 reference values for seed 1234567
        rng = SplitMix64(1234567)
        assert rng.next_uint64() == 6457827717110365317
        assert rng.next_uint64() == 3203168211198807973

    def test_shuffle_deterministic(self):
        a = list(range(10))
        b = list(range(10))
        SplitMix64(5).shuffle(a)
        SplitMix64(5).shuffle(b)
        assert a == b
        assert sorted(a) == list(range(10))
