import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpcalib.fp import KINDS, ORIGINAL_WEIGHTS, ComponentKind, FileCounts, WeightMatrix
from fpcalib.fuzzy import (
    RULE_BASE,
    FuzzySystemConfig,
    TrapezoidMF,
    TriangleMF,
    config_from_json_dict,
    config_to_json_dict,
    default_config,
    fuzzy_ufp,
    fuzzy_weight,
    fuzzy_weight_values,
    retune,
)

EI, EO, EQ, ILF, EIF = ComponentKind


@pytest.fixture(scope="module")
def config():
    return default_config(ORIGINAL_WEIGHTS)


class TestMembershipFunctions:
    def test_trapezoid_shape(self):
        mf = TrapezoidMF(0, 2, 4, 6)
        assert mf.membership(-1) == 0.0
        assert mf.membership(0) == 0.0
        assert mf.membership(1) == 0.5
        assert mf.membership(2) == 1.0
        assert mf.membership(3) == 1.0
        assert mf.membership(5) == 0.5
        assert mf.membership(6) == 0.0
        assert mf.membership(7) == 0.0

    def test_trapezoid_vertical_edge(self):
        mf = TrapezoidMF(0, 0, 1, 2)
        assert mf.membership(0) == 1.0
        assert mf.membership(1.5) == 0.5

    def test_triangle_shape(self):
        mf = TriangleMF(7, 10, 15)
        assert mf.membership(7) == 0.0
        assert mf.membership(10) == 1.0
        assert mf.membership(8.5) == 0.5
        assert mf.membership(12.5) == 0.5
        assert mf.membership(15) == 0.0

    def test_triangle_vertical_edges(self):
        assert TriangleMF(7, 7, 10).membership(7) == 1.0
        assert TriangleMF(10, 15, 15).membership(15) == 1.0

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ValueError):
            TrapezoidMF(3, 2, 4, 6)
        with pytest.raises(ValueError):
            TriangleMF(3, 2, 4)
        with pytest.raises(ValueError):
            TriangleMF(3, 3, 3)

    @given(st.floats(-5, 80))
    def test_membership_bounded(self, x):
        for mf in (TrapezoidMF(0, 0, 15, 25), TrapezoidMF(15, 25, 45, 55),
                   TriangleMF(7, 7, 10), TriangleMF(7, 10, 15)):
            assert 0.0 <= mf.membership(x) <= 1.0

    def test_piecewise_linear_between_breakpoints(self):
        mf = TrapezoidMF(15, 25, 45, 55)
        for lo, hi in [(15, 25), (25, 45), (45, 55)]:
            xs = np.linspace(lo, hi, 11)
            mus = [mf.membership(x) for x in xs]
            expect = np.interp(xs, [lo, hi], [mus[0], mus[-1]])
            assert np.allclose(mus, expect)


class TestDefaultConfig:
    def test_published_ilf_parameters(self, config):
        sets = config.sets_for(ILF)
        assert sets.input1.small.params() == (0, 0, 15, 25)
        assert sets.input1.medium.params() == (15, 25, 45, 55)
        assert sets.input1.large.params() == (45, 55, 70, 70)
        assert sets.input2.small.params() == (0, 0, 1, 2)
        assert sets.input2.medium.params() == (0, 2, 4, 6)
        assert sets.input2.large.params() == (4, 6, 10, 10)
        assert sets.output.low.params() == (7, 7, 10)
        assert sets.output.average.params() == (7, 10, 15)
        assert sets.output.high.params() == (10, 15, 15)

    def test_eif_shares_ilf_input_axes(self, config):
        ilf, eif = config.sets_for(ILF), config.sets_for(EIF)
        assert ilf.input1 == eif.input1
        assert ilf.input2 == eif.input2
        assert eif.output.low.params() == (5, 5, 7)
        assert eif.output.average.params() == (5, 7, 10)
        assert eif.output.high.params() == (7, 10, 10)

    def test_ei_output_triangles(self, config):
        out = config.sets_for(EI).output
        assert out.low.params() == (3, 3, 4)
        assert out.average.params() == (3, 4, 6)
        assert out.high.params() == (4, 6, 6)

    def test_transaction_input_sets_cover_their_axes(self, config):
        for kind in (EI, EO, EQ):
            for sets in (config.sets_for(kind).input1, config.sets_for(kind).input2):
                xs = np.linspace(0, sets.top, 200)
                coverage = [max(sets.memberships(x).values()) for x in xs]
                assert min(coverage) > 0.0

    def test_rule_base_is_the_linguistic_matrix(self):
        assert RULE_BASE[("small", "small")] == "low"
        assert RULE_BASE[("small", "large")] == "average"
        assert RULE_BASE[("medium", "medium")] == "average"
        assert RULE_BASE[("large", "small")] == "average"
        assert RULE_BASE[("large", "large")] == "high"
        assert len(RULE_BASE) == 9

    def test_calibrated_output_triangles(self):
        calibrated = WeightMatrix.from_rows(
            {EI: (1.8, 2.9, 5.4), EO: (3.3, 4.4, 6.2), EQ: (1.8, 2.9, 5.4),
             ILF: (5.4, 9.8, 14.9), EIF: (4.6, 6.9, 9.9)}
        )
        out = default_config(calibrated).sets_for(EI).output
        assert out.low.params() == (1.8, 1.8, 2.9)
        assert out.average.params() == (1.8, 2.9, 5.4)
        assert out.high.params() == (2.9, 5.4, 5.4)


class TestFuzzyWeight:
    @pytest.mark.parametrize(
        "det,ret,target",
        [(50, 3, 11.4), (20, 3, 10.4), (19, 3, 10.2)],
    )
    def test_published_worked_values(self, config, det, ret, target):
        value = fuzzy_weight(config, ILF, FileCounts(ret, det))
        assert value == pytest.approx(target, abs=0.15)

    def test_single_rule_limit_is_full_triangle_centroid(self, config):
        # DET 35 / RET 3 fires only the (medium, medium) rule at strength 1
        value = fuzzy_weight(config, ILF, FileCounts(3, 35))
        assert value == pytest.approx((7 + 10 + 15) / 3, abs=1e-9)

    def test_analytic_matches_grid_oracle(self, config):
        rng = np.random.default_rng(12345)
        for kind in KINDS:
            sets = config.sets_for(kind)
            for _ in range(120):
                det = rng.uniform(0, sets.input1.top * 1.3)
                pf = rng.uniform(0, sets.input2.top * 1.3)
                analytic = fuzzy_weight_values(config, kind, det, pf)
                grid = fuzzy_weight_values(config, kind, det, pf, method="grid")
                assert analytic == pytest.approx(grid, abs=5e-5)

    def test_result_within_output_hull(self, config):
        rng = np.random.default_rng(7)
        for kind in KINDS:
            sets = config.sets_for(kind)
            lo, hi = sets.output.hull
            for _ in range(80):
                value = fuzzy_weight_values(
                    config, kind, rng.uniform(0, sets.input1.top), rng.uniform(0, sets.input2.top)
                )
                assert lo <= value <= hi

    def test_inputs_above_top_foot_clamp(self, config):
        top = fuzzy_weight(config, ILF, FileCounts(10, 70))
        assert fuzzy_weight(config, ILF, FileCounts(25, 200)) == pytest.approx(top)

    def test_trend_and_bounded_dips(self, config):
        # Min-max inference is not globally monotone: where two rules share
        # a consequent their max-of-mins dips at membership crossovers.
        # The excursions stay small against the 8-unit output scale and the
        # overall trend is increasing.
        dets = np.linspace(0, 70, 141)
        rets = np.arange(0, 11)
        vals = np.array(
            [[fuzzy_weight_values(config, ILF, d, r) for d in dets] for r in rets]
        )
        assert np.diff(vals, axis=1).min() > -0.06
        assert np.diff(vals, axis=0).min() > -0.38
        assert vals[:, -1].min() >= vals[:, 0].max()  # DET trend
        assert vals[-1, :].min() >= vals[0, :].max()  # RET trend

    def test_monotone_where_one_input_term_is_pure(self, config):
        # RET 3 keeps the medium term at full membership, so no strength
        # trading occurs and the DET profile is cleanly non-decreasing.
        values = [fuzzy_weight_values(config, ILF, d, 3) for d in np.linspace(0, 70, 281)]
        assert all(b - a >= -1e-12 for a, b in zip(values, values[1:]))

    def test_continuous_in_det(self, config):
        # steepest observed slope is ~1.5 weight units per DET unit at the
        # set shoulders; a crisp classifier steps by 3.0 at one DET
        values = [fuzzy_weight_values(config, ILF, d, 3) for d in np.linspace(0, 70, 1401)]
        jumps = np.abs(np.diff(values))
        assert jumps.max() < 0.15

    def test_scaling_equivariance(self, config):
        for k in (0.5, 2.0, 3.7):
            scaled = WeightMatrix.from_vector(k * ORIGINAL_WEIGHTS.as_vector())
            scaled_config = default_config(scaled)
            for det, ret in [(50, 3), (19, 3), (33, 7), (60, 1)]:
                base = fuzzy_weight(config, ILF, FileCounts(ret, det))
                assert fuzzy_weight(scaled_config, ILF, FileCounts(ret, det)) == pytest.approx(
                    k * base, rel=1e-9
                )

    def test_zero_inputs_give_lowest_region(self, config):
        value = fuzzy_weight(config, ILF, FileCounts(0, 0))
        assert value == pytest.approx((7 + 7 + 10) / 3, abs=1e-9)

    def test_rejects_negative_inputs(self, config):
        with pytest.raises(ValueError):
            fuzzy_weight_values(config, ILF, -1.0, 3.0)


class TestFuzzyUfp:
    def test_empty_inventory(self, config):
        assert fuzzy_ufp(config, []) == 0.0

    def test_worked_three_file_sum(self, config):
        inventory = [
            (ILF, FileCounts(3, 50)),
            (ILF, FileCounts(3, 20)),
            (ILF, FileCounts(3, 19)),
        ]
        assert fuzzy_ufp(config, inventory) == pytest.approx(32.0, abs=0.45)

    def test_single_component_equals_fuzzy_weight(self, config):
        files = FileCounts(3, 35)
        assert fuzzy_ufp(config, [(ILF, files)]) == fuzzy_weight(config, ILF, files)


class TestRetune:
    def test_retune_with_original_weights_is_identity(self, config):
        assert retune(config, ORIGINAL_WEIGHTS) == config

    def test_retune_rebuilds_output_triangles(self, config):
        calibrated = WeightMatrix.from_rows(
            {EI: (1.8, 2.9, 5.4), EO: (3.3, 4.4, 6.2), EQ: (1.8, 2.9, 5.4),
             ILF: (5.4, 9.8, 14.9), EIF: (4.6, 6.9, 9.9)}
        )
        tuned = retune(config, calibrated)
        out = tuned.sets_for(ILF).output
        assert out.low.params() == (5.4, 5.4, 9.8)
        assert out.average.params() == (5.4, 9.8, 14.9)
        assert out.high.params() == (9.8, 14.9, 14.9)
        # input axes untouched
        assert tuned.sets_for(ILF).input1 == config.sets_for(ILF).input1
        assert tuned.sets_for(ILF).input2 == config.sets_for(ILF).input2

    def test_retune_idempotent(self, config):
        calibrated = WeightMatrix.from_rows(
            {EI: (1.8, 2.9, 5.4), EO: (3.3, 4.4, 6.2), EQ: (1.8, 2.9, 5.4),
             ILF: (5.4, 9.8, 14.9), EIF: (4.6, 6.9, 9.9)}
        )
        once = retune(config, calibrated)
        assert retune(once, calibrated) == once

    def test_lower_weights_lower_the_measurement(self, config):
        calibrated = WeightMatrix.from_vector(0.7 * ORIGINAL_WEIGHTS.as_vector())
        tuned = retune(config, calibrated)
        for det, ret in [(50, 3), (19, 3), (35, 3)]:
            assert fuzzy_weight(tuned, ILF, FileCounts(ret, det)) < fuzzy_weight(
                config, ILF, FileCounts(ret, det)
            )


class TestConfigSerialization:
    def test_json_round_trip(self, config):
        doc = config_to_json_dict(config)
        assert doc["ILF"]["input1"]["small"] == [0, 0, 15, 25]
        assert doc["ILF"]["output"]["high"] == [10, 15, 15]
        assert config_from_json_dict(doc) == config

    def test_missing_component_rejected(self, config):
        doc = config_to_json_dict(config)
        del doc["EQ"]
        with pytest.raises(ValueError, match="EQ"):
            config_from_json_dict(doc)
