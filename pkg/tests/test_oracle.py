import numpy as np
import pytest

from latentedit import (
    CANONICAL_ATTRIBUTES,
    CANONICAL_SUPPORTS,
    ConfigError,
    Dense,
    EditConfig,
    EditDirection,
    HardMask,
    LatentCode,
    ToyGenerator,
    ULTRA_STRICT_MASK,
    attribute_scores,
    canonical_generator,
    finite_difference_gradient,
    leakage_report,
    make_benchmark,
    mask_direction,
    sample_coords,
)

UNIT_CFG = EditConfig(alpha=1.0, edit_factor=1.0, strategy=Dense())


def naive_scores(generator, w):
    """Independent double-loop summation oracle."""
    out = {}
    for k, name in enumerate(generator.attributes):
        acc = 0.0
        for i in range(18):
            for j in range(512):
                acc += float(generator.coupling[k, i, j]) * float(w.values[i, j])
        out[name] = acc
    return out


class TestCanonicalGenerator:
    def test_attribute_names(self):
        g = canonical_generator(0)
        assert g.attributes == CANONICAL_ATTRIBUTES == ("hair", "gender", "makeup")

    def test_unit_frobenius_norms(self):
        g = canonical_generator(3)
        norms = np.sqrt((g.coupling**2).sum(axis=(1, 2)))
        np.testing.assert_allclose(norms, 1.0, atol=1e-12)

    def test_supports_match_layer_blocks(self):
        g = canonical_generator(1)
        for name, rows in CANONICAL_SUPPORTS.items():
            assert g.support(name) == frozenset(rows)

    def test_deterministic_per_seed(self):
        assert np.array_equal(canonical_generator(7).coupling, canonical_generator(7).coupling)
        assert not np.array_equal(canonical_generator(7).coupling, canonical_generator(8).coupling)

    def test_non_unit_norm_rejected(self):
        coupling = np.zeros((1, 18, 512))
        coupling[0, 0, 0] = 2.0
        with pytest.raises(ConfigError, match="unit Frobenius"):
            ToyGenerator(("hair",), coupling)


class TestAttributeScores:
    def test_zero_latent_scores_zero(self):
        g = canonical_generator(0)
        assert attribute_scores(g, LatentCode.zeros()) == {
            "hair": 0.0,
            "gender": 0.0,
            "makeup": 0.0,
        }

    def test_disjoint_support_gives_exact_zero(self):
        rng = np.random.default_rng(2)
        g = canonical_generator(0)
        values = np.zeros((18, 512))
        values[0:4] = rng.standard_normal((4, 512))
        scores = attribute_scores(g, LatentCode(values))
        assert scores["hair"] == 0.0
        assert scores["makeup"] == 0.0
        assert scores["gender"] != 0.0

    def test_matches_naive_summation(self):
        rng = np.random.default_rng(3)
        g = canonical_generator(5)
        w = LatentCode(rng.standard_normal((18, 512)))
        fast = attribute_scores(g, w)
        slow = naive_scores(g, w)
        for name in g.attributes:
            assert fast[name] == pytest.approx(slow[name], rel=1e-12)


class TestLeakageReport:
    def test_zero_direction_zero_deltas(self):
        g = canonical_generator(0)
        rng = np.random.default_rng(4)
        w = LatentCode(rng.standard_normal((18, 512)))
        report = leakage_report(g, w, EditDirection.zeros(), UNIT_CFG)
        assert report == {"hair": 0.0, "gender": 0.0, "makeup": 0.0}

    def test_masked_direction_cannot_leak(self):
        g = canonical_generator(0)
        rng = np.random.default_rng(5)
        w = LatentCode(rng.standard_normal((18, 512)))
        d = mask_direction(EditDirection(rng.standard_normal((18, 512))), ULTRA_STRICT_MASK)
        cfg = EditConfig(alpha=1.0, edit_factor=1.0, strategy=HardMask(ULTRA_STRICT_MASK))
        report = leakage_report(g, w, d, cfg)
        assert report["gender"] == 0.0
        assert report["makeup"] == 0.0
        assert report["hair"] != 0.0

    def test_unconstrained_benchmark_minimizer_leaks(self):
        bench = make_benchmark(0)
        rng = np.random.default_rng(6)
        w = LatentCode(rng.standard_normal((18, 512)))
        report = leakage_report(bench.generator, w, bench.unconstrained_minimizer(), UNIT_CFG)
        assert abs(report["gender"]) > 1e-6
        assert abs(report["makeup"]) > 1e-6


class TestBenchmark:
    def test_same_seed_identical(self):
        a, b = make_benchmark(3), make_benchmark(3)
        assert np.array_equal(a.generator.coupling, b.generator.coupling)
        assert (a.target_shift, a.bias_strength, a.ridge) == (
            b.target_shift,
            b.bias_strength,
            b.ridge,
        )

    def test_seed_zero_minimizer_has_locked_mass(self):
        bench = make_benchmark(0)
        assert bench.locked_mass(bench.unconstrained_minimizer()) > 1e-3

    def test_closed_form_minimizer_is_stationary(self):
        bench = make_benchmark(1)
        _, grad = bench.objective.evaluate(bench.unconstrained_minimizer())
        assert np.abs(grad.values).max() < 1e-10

    def test_objective_value_at_zero(self):
        bench = make_benchmark(2)
        loss, grad = bench.objective.evaluate(EditDirection.zeros())
        assert loss == pytest.approx(bench.target_shift**2, rel=1e-12)
        expected = -2.0 * bench.target_shift * bench.target_coupling
        expected = expected + bench.bias_strength * bench.bias_coupling
        np.testing.assert_allclose(grad.values, expected, rtol=1e-12, atol=1e-15)

    def test_gradient_matches_finite_differences(self):
        bench = make_benchmark(0)
        rng = np.random.default_rng(7)
        d = EditDirection(rng.standard_normal((18, 512)) * 0.1)
        coords = sample_coords(64, seed=2)
        fd = finite_difference_gradient(bench.objective, d, h=1e-5, coords=coords)
        _, analytic = bench.objective.evaluate(d)
        for i, j in coords:
            assert fd.values[i, j] == pytest.approx(analytic.values[i, j], rel=1e-5, abs=1e-8)

    def test_bad_parameters_rejected(self):
        with pytest.raises(ConfigError):
            make_benchmark(0, target_shift=0.0)
        with pytest.raises(ConfigError):
            make_benchmark(0, ridge=0.0)
        with pytest.raises(ConfigError):
            make_benchmark(0, bias_strength=-1.0)
