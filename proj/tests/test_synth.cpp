#include <gtest/gtest.h>

#include "sitekit/aggregate.hpp"
#include "sitekit/evaluate.hpp"
#include "sitekit/metrics.hpp"
#include "sitekit/synth.hpp"

namespace sitekit {
namespace {

synth::SynthSpec small_spec(std::vector<double> sep, std::uint64_t seed = 1) {
  synth::SynthSpec spec;
  spec.n_models = static_cast<int>(sep.size());
  spec.classes = 4;
  spec.subsets = 2;
  spec.frames_per_subset = 200;
  spec.dim = 6;
  spec.separability = std::move(sep);
  spec.seed = seed;
  return spec;
}

TEST(Synth, SimplexIsRegular) {
  for (int c : {2, 3, 5, 8}) {
    const Matrix m = synth::simplex_means(c, c + 2, 3.0);
    EXPECT_NEAR(m.colwise().sum().norm(), 0.0, 1e-12);
    for (int i = 0; i < c; ++i)
      for (int j = i + 1; j < c; ++j) EXPECT_NEAR((m.row(i) - m.row(j)).norm(), 3.0, 1e-12);
  }
  EXPECT_THROW(synth::simplex_means(5, 3, 1.0), std::invalid_argument);
}

TEST(Synth, DeterministicForFixedSeed) {
  const auto a = synth::generate_suite(small_spec({1.0, 2.0}, 99));
  const auto b = synth::generate_suite(small_spec({1.0, 2.0}, 99));
  const auto c = synth::generate_suite(small_spec({1.0, 2.0}, 100));
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].name, "model_00");
  EXPECT_EQ(a[1].subsets[1].subset_id, "subset_01");
  for (std::size_t m = 0; m < a.size(); ++m)
    for (std::size_t s = 0; s < a[m].subsets.size(); ++s) {
      EXPECT_EQ(a[m].subsets[s].features, b[m].subsets[s].features);
      EXPECT_EQ(a[m].subsets[s].labels, b[m].subsets[s].labels);
    }
  EXPECT_NE(a[0].subsets[0].features, c[0].subsets[0].features);
  EXPECT_EQ(a[0].subsets[0].labels[5], 1);
}

TEST(Synth, ModelStreamsAreIndependentOfPoolSize) {
  const auto two = synth::generate_suite(small_spec({1.0, 2.0}, 5));
  const auto three = synth::generate_suite(small_spec({1.0, 2.0, 3.0}, 5));
  EXPECT_EQ(two[1].subsets[0].features, three[1].subsets[0].features);
}

TEST(Synth, ZeroSeparabilityIsUninformative) {
  synth::SynthSpec spec = small_spec({0.0});
  spec.frames_per_subset = 2000;
  spec.subsets = 1;
  auto suite = synth::generate_suite(spec);
  const auto& s = suite[0].subsets[0];
  EXPECT_LT(metrics::hscore(s.features, s.labels, MetricConfig{}), 0.1);
  const double acc = synth::pseudo_ground_truth(suite[0], 0.5, 3);
  EXPECT_NEAR(acc, 0.25, 0.05);
}

TEST(Synth, WideSeparationIsNearlyPerfect) {
  synth::SynthSpec spec = small_spec({10.0});
  spec.noise_sigma = 0.5;
  const auto suite = synth::generate_suite(spec);
  EXPECT_GT(synth::pseudo_ground_truth(suite[0], 0.3, 4), 0.99);
}

TEST(Synth, EveryMetricPrefersTheSeparableModel) {
  const auto suite = synth::generate_suite(small_spec({0.5, 5.0}, 8));
  const auto cfgs = expand_configs(kAllMetrics, kAllAggregations, MetricConfig{});
  const ScoreTable table = build_score_table(suite, cfgs);
  for (Metric m : kAllMetrics)
    for (Aggregation a : kAllAggregations)
      EXPECT_GT(*table.global_score("model_01", m, a), *table.global_score("model_00", m, a))
          << to_string(m) << " " << to_string(a);
}

TEST(Synth, AccuracyRisesAlongSweep) {
  auto suite = synth::generate_suite(small_spec(synth::linear_sweep(0.0, 5.0, 6), 12));
  synth::attach_pseudo_ground_truth(suite, 0.3, 77);
  for (std::size_t i = 1; i < suite.size(); ++i)
    EXPECT_GE(*suite[i].ground_truth, *suite[i - 1].ground_truth - 0.02) << i;
  EXPECT_GT(*suite.back().ground_truth, *suite.front().ground_truth + 0.3);

  std::vector<double> sep = synth::linear_sweep(0.0, 5.0, 6), acc;
  for (const auto& m : suite) acc.push_back(*m.ground_truth);
  EXPECT_GE(kendall_tau(sep, acc), 0.9);
}

TEST(Synth, SweepAndValidation) {
  EXPECT_EQ(synth::linear_sweep(1.0, 3.0, 3), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_THROW(synth::generate_suite(small_spec({})), std::invalid_argument);
  synth::SynthSpec bad = small_spec({1.0});
  bad.dim = 2;
  EXPECT_THROW(synth::generate_suite(bad), std::invalid_argument);
  bad = small_spec({-1.0});
  EXPECT_THROW(synth::generate_suite(bad), std::invalid_argument);
}

TEST(Synth, PseudoGroundTruthRejectsMissingClass) {
  CandidateModel m{"m", {{"s", Matrix::Zero(4, 2), Labels{0, 0, 0, 1}}}, std::nullopt};
  EXPECT_THROW(synth::pseudo_ground_truth(m, 0.25, 1), std::invalid_argument);
  EXPECT_THROW(synth::pseudo_ground_truth(m, 1.5, 1), std::invalid_argument);
}

TEST(Synth, ScorePoolIsReproducible) {
  const std::vector<double> acc{0.2, 0.5, 0.9};
  const auto a = synth::generate_score_pool(acc, 0.01, 3);
  const auto b = synth::generate_score_pool(acc, 0.01, 3);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.ground_truth.at("model_02"), 0.9);
  const auto exact = synth::generate_score_pool(acc, 0.0, 3);
  EXPECT_EQ(exact.scores, exact.ground_truth);
}

}  // namespace
}  // namespace sitekit
