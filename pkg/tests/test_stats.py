import math

import pytest

from iocattrib.errors import ValidationError
from iocattrib.stats import summarize_distribution, z_test

from conftest import TABLE4_COUNTS


class TestSummarizeDistribution:
    def test_file_hash_column_exact(self):
        values = [row[1] for row in TABLE4_COUNTS]
        s = summarize_distribution(values)
        assert s.mean == 32.0
        assert s.median == 26.5
        assert s.iqr == 32.25

    def test_ip_column_exact(self):
        values = [row[2] for row in TABLE4_COUNTS]
        s = summarize_distribution(values)
        assert s.mean == 9.1875
        assert s.median == 1.0
        assert s.iqr == 7.25

    def test_domain_column_exact(self):
        values = [row[3] for row in TABLE4_COUNTS]
        s = summarize_distribution(values)
        assert s.mean == 22.8125
        assert s.median == 13.5
        assert s.iqr == 31.25

    def test_constant_list(self):
        s = summarize_distribution([5, 5, 5])
        assert s.mean == 5.0
        assert s.std == 0.0
        assert s.iqr == 0.0

    def test_quartile_order_invariant(self):
        s = summarize_distribution([9, 1, 4, 7, 2, 8, 3])
        assert s.q1 <= s.median <= s.q3

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            summarize_distribution([])


class TestZTest:
    def test_identical_samples(self):
        sample = [1.0, 2.0, 3.0, 4.0]
        result = z_test(sample, sample)
        assert result.z == 0.0
        assert result.p_value == 1.0

    def test_hand_computed_case(self):
        # two samples with exact mean 0 / 1 and exact sample SD 1:
        # z = (0 - 1) / sqrt(1/100 + 1/100) = -7.0711
        c = math.sqrt(99) / 10.0
        sample_a = [c] * 50 + [-c] * 50
        sample_b = [v + 1.0 for v in sample_a]
        result = z_test(sample_a, sample_b)
        assert abs(result.z - (-7.0711)) < 1e-4
        assert result.p_value < 1e-11
        assert result.warnings == ()

    def test_sign_follows_mean_difference(self):
        a = [1.0, 2.0, 3.0, 2.0] * 10
        b = [5.0, 6.0, 7.0, 6.0] * 10
        assert z_test(a, b).z < 0
        assert z_test(b, a).z > 0

    def test_small_sample_warning(self):
        result = z_test([1.0, 2.0, 3.0], [2.0, 3.0, 4.0])
        assert result.warnings

    def test_tiny_sample_rejected(self):
        with pytest.raises(ValidationError):
            z_test([1.0], [1.0, 2.0])
