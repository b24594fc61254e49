import numpy as np
import pytest

from iocattrib.errors import ValidationError
from iocattrib.featurize import (
    DatasetLevel,
    build_feature_space,
    decode_bits,
    encode_incident,
    vectorize_lowlevel,
    vectorize_matrix,
)
from iocattrib.ingest import FeatureKind, IocRecord, load_lowlevel_csv, load_matrix_csv


@pytest.fixture
def table3_space(table3_path):
    matrix = load_matrix_csv(table3_path)
    return matrix, build_feature_space(matrix)


class TestBuildFeatureSpace:
    def test_canonical_order_from_table3(self, table3_space):
        _, space = table3_space
        assert [f.id for f in space.features] == ["T1083", "T1189", "S0020", "S0234"]

    def test_single_record(self):
        records = [IocRecord("Naikon", "r1", FeatureKind.DOMAIN, "cipta.kevins.pw")]
        space = build_feature_space(records)
        assert space.size == 1
        assert space.features[0].id == "domain:cipta.kevins.pw"

    def test_empty_source_rejected(self):
        with pytest.raises(ValidationError):
            build_feature_space([])

    def test_full_fixture_matches_set_union(self, lowlevel_fixture):
        records = load_lowlevel_csv(lowlevel_fixture)
        space = build_feature_space(records)
        # independent brute-force union of distinct (kind, value) pairs
        distinct = {(r.kind, r.value) for r in records}
        assert space.size == len(distinct)

    def test_order_stable_across_builds(self, lowlevel_fixture):
        records = load_lowlevel_csv(lowlevel_fixture)
        a = build_feature_space(records)
        b = build_feature_space(list(reversed(records)))
        assert a.features == b.features


class TestVectorizeMatrix:
    def test_table3(self, table3_space):
        matrix, space = table3_space
        dataset = vectorize_matrix(matrix, space)
        assert len(dataset) == 7
        by_label = {inst.label: inst for inst in dataset.instances}
        bd = by_label["Backdoor Diplomacy"]
        assert bd.vector.positive_count == 1
        assert decode_bits(bd.vector, space) == ["S0020"]
        assert dataset.level == DatasetLevel.HIGH

    def test_zero_row_representable(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("actor,T1189\nGhost,0\n")
        matrix = load_matrix_csv(path)
        dataset = vectorize_matrix(matrix, build_feature_space(matrix))
        assert dataset.instances[0].vector.positive_count == 0

    def test_full_fixture_129_originals(self, highlevel_fixture):
        matrix = load_matrix_csv(highlevel_fixture)
        dataset = vectorize_matrix(matrix, build_feature_space(matrix))
        assert len(dataset) == 129
        assert all(inst.provenance.is_original for inst in dataset.instances)

    def test_unknown_feature_rejected(self, table3_space):
        matrix, _ = table3_space
        records = [IocRecord("X", "r1", FeatureKind.IP, "1.2.3.4")]
        other_space = build_feature_space(records)
        with pytest.raises(ValidationError, match="not in the feature space"):
            vectorize_matrix(matrix, other_space)

    def test_bit_sum_preserved(self, highlevel_fixture):
        matrix = load_matrix_csv(highlevel_fixture)
        dataset = vectorize_matrix(matrix, build_feature_space(matrix))
        total = sum(inst.vector.positive_count for inst in dataset.instances)
        assert total == int(matrix.cells.sum())


class TestVectorizeLowlevel:
    def test_disjoint_reports_disjoint_vectors(self):
        records = [
            IocRecord("A", "r1", FeatureKind.IP, "1.1.1.1"),
            IocRecord("A", "r2", FeatureKind.IP, "2.2.2.2"),
        ]
        dataset, warnings = vectorize_lowlevel(records, build_feature_space(records))
        assert len(dataset) == 2
        assert warnings == []
        v1, v2 = (inst.vector.bits for inst in dataset.instances)
        assert int((v1 & v2).sum()) == 0

    def test_repeated_token_sets_bit_once(self):
        records = [
            IocRecord("A", "r1", FeatureKind.DOMAIN, "x.com"),
            IocRecord("A", "r1", FeatureKind.DOMAIN, "x.com"),
            IocRecord("A", "r1", FeatureKind.DOMAIN, "y.com"),
        ]
        dataset, _ = vectorize_lowlevel(records, build_feature_space(records))
        assert dataset.instances[0].vector.positive_count == 2

    def test_instance_count_matches_groupby(self, lowlevel_fixture):
        records = load_lowlevel_csv(lowlevel_fixture)
        dataset, warnings = vectorize_lowlevel(records, build_feature_space(records))
        # independent group-by count
        groups = {(r.actor, r.report_id) for r in records}
        assert len(dataset) == len(groups)
        assert warnings == []
        assert dataset.level == DatasetLevel.LOW

    def test_unknown_only_group_skipped_with_warning(self):
        records = [IocRecord("A", "r1", FeatureKind.IP, "1.1.1.1")]
        space = build_feature_space(
            [IocRecord("B", "r9", FeatureKind.DOMAIN, "z.org")]
        )
        dataset, warnings = vectorize_lowlevel(records, space)
        assert len(dataset) == 0
        assert len(warnings) == 1


class TestEncodeIncident:
    def test_table3_ids(self, table3_space):
        _, space = table3_space
        vector, unknowns = encode_incident(["T1189", "T1083"], space)
        assert list(vector.bits) == [1, 1, 0, 0]
        assert unknowns == []

    def test_unknown_id_surfaced(self, table3_space):
        _, space = table3_space
        vector, unknowns = encode_incident(["T9999"], space)
        assert vector.positive_count == 0
        assert unknowns == ["T9999"]

    def test_duplicates_set_single_bit(self, table3_space):
        _, space = table3_space
        vector, unknowns = encode_incident(["S0020", "S0020"], space)
        assert vector.positive_count == 1
        assert unknowns == []

    def test_empty_list_rejected(self, table3_space):
        _, space = table3_space
        with pytest.raises(ValidationError, match="nothing observed"):
            encode_incident([], space)

    def test_encode_decode_recovers_known_ids(self, table3_space):
        _, space = table3_space
        observed = ["S0234", "T1083", "T9999", "T1083"]
        vector, unknowns = encode_incident(observed, space)
        recovered = set(decode_bits(vector, space))
        assert recovered == {"S0234", "T1083"}
        assert unknowns == ["T9999"]
