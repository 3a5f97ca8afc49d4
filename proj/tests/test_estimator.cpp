// Copyright 2026 The DCEE Search Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "dcee/errors.hpp"
#include "dcee/estimator.hpp"
#include "oracles.hpp"

namespace {

using dcee::Measurement;
using dcee::ParticleSet;
using dcee::PriorSpec;
using dcee::SensorParams;
using dcee::SourceTerm;

SourceTerm truth() { return SourceTerm{{25.0, 25.0, 1.0}, 5.0, 4.0, 0.0, 1.0, 8.0}; }

PriorSpec release_rate_only() {
  PriorSpec spec;
  spec.fixed = truth();
  spec.source_x.free = false;
  spec.source_y.free = false;
  spec.source_z.free = false;
  return spec;
}

ParticleSet uniform_set(std::vector<SourceTerm> particles) {
  ParticleSet ps;
  ps.weights.assign(particles.size(), 1.0 / static_cast<double>(particles.size()));
  ps.particles = std::move(particles);
  return ps;
}

TEST(Params, GetSetRoundTrip) {
  SourceTerm t = truth();
  double v = 1.0;
  for (const auto p : dcee::kAllParams) {
    dcee::set_param(t, p, v);
    EXPECT_EQ(dcee::get_param(t, p), v);
    EXPECT_FALSE(dcee::param_name(p).empty());
    v += 0.5;
  }
  dcee::set_param(t, dcee::Param::kWindDir, -0.5);
  EXPECT_NEAR(t.wind_dir, 2.0 * std::numbers::pi - 0.5, 1e-15);
}

TEST(Prior, SampleMoments) {
  PriorSpec spec;
  spec.fixed = truth();
  auto rng = dcee::make_rng(1);
  const std::size_t n = 100000;
  const auto ps = dcee::sample_prior(spec, n, rng);
  double sx = 0.0;
  double sq = 0.0;
  double sq2 = 0.0;
  for (const auto& t : ps.particles) {
    EXPECT_TRUE(t.source.x >= 0.0 && t.source.x <= 50.0);
    EXPECT_TRUE(t.source.z >= 0.0 && t.source.z <= 8.0);
    EXPECT_GT(t.release_rate, 0.0);
    EXPECT_EQ(t.wind_speed, 4.0);
    sx += t.source.x;
    sq += t.release_rate;
    sq2 += t.release_rate * t.release_rate;
  }
  const double dn = static_cast<double>(n);
  // Uniform(0, 50): mean 25, sd 50 / sqrt(12). Gamma(2, 5): mean 10, variance 50.
  EXPECT_NEAR(sx / dn, 25.0, 4.0 * (50.0 / std::sqrt(12.0)) / std::sqrt(dn));
  EXPECT_NEAR(sq / dn, 10.0, 4.0 * std::sqrt(50.0 / dn));
  EXPECT_NEAR(sq2 / dn - (sq / dn) * (sq / dn), 50.0, 2.0);
  EXPECT_NEAR(std::accumulate(ps.weights.begin(), ps.weights.end(), 0.0), 1.0, 1e-9);
}

TEST(Prior, TruncatedNormalsStayAdmissible) {
  PriorSpec spec;
  spec.fixed = truth();
  spec.diffusivity = {{0.2, 4.0}, true};
  spec.wind_speed = {{0.5, 4.0}, true};
  auto rng = dcee::make_rng(2);
  const auto ps = dcee::sample_prior(spec, 5000, rng);
  for (const auto& t : ps.particles) {
    EXPECT_GT(t.diffusivity, 0.0);
    EXPECT_GE(t.wind_speed, 0.0);
    EXPECT_NO_THROW(dcee::validate(t));
  }
}

TEST(Prior, RejectsTooFewParticles) {
  PriorSpec spec;
  auto rng = dcee::make_rng(3);
  EXPECT_THROW(dcee::sample_prior(spec, 1, rng), dcee::ConfigError);
}

TEST(Prior, ValidateNamesField) {
  PriorSpec spec;
  spec.release_rate.dist.scale = -1.0;
  try {
    dcee::validate(spec);
    FAIL() << "expected ConfigError";
  } catch (const dcee::ConfigError& e) {
    EXPECT_EQ(e.path(), "prior.release_rate.scale");
  }
}

TEST(Prior, LogDensityOutsideSupport) {
  PriorSpec spec;
  spec.fixed = truth();
  SourceTerm t = truth();
  EXPECT_TRUE(std::isfinite(spec.log_density(t)));
  t.source.x = 51.0;
  EXPECT_EQ(spec.log_density(t), -std::numeric_limits<double>::infinity());
  t = truth();
  t.release_rate = -1.0;
  EXPECT_EQ(spec.log_density(t), -std::numeric_limits<double>::infinity());
}

TEST(History, RequiresIncreasingTime) {
  dcee::MeasurementHistory h;
  h.push_back({0.0, false, {}, 0});
  h.push_back({0.0, false, {}, 2});
  EXPECT_THROW(h.push_back({0.0, false, {}, 2}), dcee::InvalidParameter);
  EXPECT_EQ(h.size(), 2U);
}

TEST(Ess, KnownWeights) {
  ParticleSet ps = uniform_set({truth(), truth(), truth()});
  ps.weights = {0.5, 0.25, 0.25};
  EXPECT_NEAR(dcee::effective_sample_size(ps), 8.0 / 3.0, 1e-12);
  ps.weights = {1.0, 0.0, 0.0};
  EXPECT_NEAR(dcee::effective_sample_size(ps), 1.0, 1e-12);
}

TEST(Resample, CountsWithinOneOfExpectation) {
  std::vector<SourceTerm> particles(7, truth());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    particles[i].release_rate = static_cast<double>(i + 1);
  }
  ParticleSet ps = uniform_set(particles);
  ps.weights = {0.05, 0.3, 0.0, 0.15, 0.2, 0.1, 0.2};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto rng = dcee::make_rng(seed);
    const auto out = dcee::systematic_resample(ps, rng);
    ASSERT_EQ(out.size(), ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto copies = std::count_if(out.particles.begin(), out.particles.end(),
                                        [&](const SourceTerm& t) { return t.release_rate == ps.particles[i].release_rate; });
      const double expected = ps.weights[i] * static_cast<double>(ps.size());
      EXPECT_GE(static_cast<double>(copies), std::floor(expected) - 1e-9);
      EXPECT_LE(static_cast<double>(copies), std::ceil(expected) + 1e-9);
    }
    for (const double w : out.weights) {
      EXPECT_DOUBLE_EQ(w, 1.0 / 7.0);
    }
  }
}

TEST(Resample, EqualWeightsKeepEveryParticle) {
  std::vector<SourceTerm> particles(5, truth());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    particles[i].source.x = static_cast<double>(i);
  }
  auto rng = dcee::make_rng(9);
  const auto out = dcee::systematic_resample(uniform_set(particles), rng);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    EXPECT_EQ(out.particles[i].source.x, static_cast<double>(i));
  }
}

TEST(BayesUpdate, MatchesGridPosterior) {
  // 101 source-x hypotheses; exhaustive products of likelihoods are the reference.
  SensorParams sp;
  sp.noise_ratio_detect = 0.1;
  std::vector<SourceTerm> grid;
  for (int i = 0; i <= 100; ++i) {
    SourceTerm t = truth();
    t.source.x = 20.0 + 0.1 * i;
    grid.push_back(t);
  }
  std::vector<Measurement> ms;
  for (int k = 0; k < 5; ++k) {
    const dcee::Position where{15.0 + k, 25.0 + 0.5 * k, 2.0};
    const double c = dcee::concentration(where, truth());
    const bool detected = k % 2 == 0;
    ms.push_back({detected ? 1.05 * c : 0.0, detected, where, k});
  }

  const auto reference = dcee::oracle::grid_posterior(grid, ms, sp);

  ParticleSet ps = uniform_set(grid);
  for (const auto& m : ms) {
    ps = dcee::bayes_update(ps, m, sp).posterior;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    tv += std::abs(ps.weights[i] - reference[i]);
  }
  EXPECT_LT(0.5 * tv, 1e-9);
  EXPECT_NEAR(std::accumulate(ps.weights.begin(), ps.weights.end(), 0.0), 1.0, 1e-12);
}

TEST(BayesUpdate, EvidenceIsWeightedLikelihood) {
  const SensorParams sp;
  ParticleSet ps = uniform_set({truth(), truth()});
  ps.particles[1].release_rate = 2.0;
  ps.weights = {0.3, 0.7};
  const Measurement m{0.0, false, {20.0, 25.0, 4.0}, 0};
  const auto r = dcee::bayes_update(ps, m, sp);
  const double l0 = dcee::oracle::non_detection_mass(dcee::concentration(m.position, ps.particles[0]), sp);
  const double l1 = dcee::oracle::non_detection_mass(dcee::concentration(m.position, ps.particles[1]), sp);
  EXPECT_NEAR(r.log_evidence, std::log(0.3 * l0 + 0.7 * l1), 1e-12);
  EXPECT_NEAR(r.posterior.weights[0], 0.3 * l0 / (0.3 * l0 + 0.7 * l1), 1e-12);
}

TEST(BayesUpdate, DegenerateThrowsWithStep) {
  const SensorParams sp;
  ParticleSet ps = uniform_set({truth(), truth()});
  // A huge detection far from any plume sits at the likelihood floor for every particle.
  const Measurement m{1e6, true, {0.0, 0.0, 4.0}, 17};
  try {
    (void)dcee::bayes_update(ps, m, sp);
    FAIL() << "expected DegeneratePosterior";
  } catch (const dcee::DegeneratePosterior& e) {
    EXPECT_EQ(e.step(), 17);
  }
}

TEST(BayesUpdate, DeadParticlesStayDead) {
  const SensorParams sp;
  ParticleSet ps = uniform_set({truth(), truth()});
  ps.weights = {1.0, 0.0};
  const auto r = dcee::bayes_update(ps, {0.0, false, {3.0, 3.0, 4.0}, 0}, sp);
  EXPECT_EQ(r.posterior.weights[1], 0.0);
  EXPECT_EQ(r.posterior.weights[0], 1.0);
}

TEST(Mcmc, EmptyHistoryIsNoOp) {
  auto rng = dcee::make_rng(4);
  PriorSpec spec;
  spec.fixed = truth();
  const auto ps = dcee::sample_prior(spec, 10, rng);
  const auto r = dcee::mcmc_move(ps, {}, spec, SensorParams{}, rng);
  EXPECT_EQ(r.particles.particles, ps.particles);
}

TEST(Mcmc, ZeroScaleLeavesParticles) {
  auto rng = dcee::make_rng(5);
  PriorSpec spec;
  spec.fixed = truth();
  const auto ps = dcee::sample_prior(spec, 50, rng);
  dcee::MeasurementHistory h;
  h.push_back({0.0, false, {2.0, 2.0, 4.0}, 0});
  const auto r = dcee::mcmc_move(ps, h, spec, SensorParams{}, rng, {3, 0.0, 1e-4});
  EXPECT_EQ(r.particles.particles, ps.particles);
}

TEST(Mcmc, HighAcceptanceAtModeWithTinySteps) {
  SensorParams sp;
  sp.noise_ratio_detect = 0.1;
  const auto spec = release_rate_only();
  const dcee::Position where{22.0, 25.0, 2.0};
  dcee::MeasurementHistory h;
  h.push_back({dcee::concentration(where, truth()), true, where, 0});
  ParticleSet ps = uniform_set({truth()});
  auto rng = dcee::make_rng(6);
  const auto r = dcee::mcmc_move(ps, h, spec, sp, rng, {1000, 0.01, 1e-4});
  EXPECT_GE(r.acceptance_rate, 0.5);
}

TEST(Mcmc, PreservesPosteriorMass) {
  // One free parameter; the posterior CDF comes from trapezoidal quadrature.
  SensorParams sp;
  sp.noise_ratio_detect = 0.3;
  const auto spec = release_rate_only();
  const dcee::Position where{22.0, 25.0, 2.0};
  const double k = dcee::concentration(where, truth()) / truth().release_rate;
  const double z = 5.0 * k;
  dcee::MeasurementHistory h;
  h.push_back({z, true, where, 0});

  const auto density = [&](double q) { return q * std::exp(-q / 5.0) * dcee::oracle::detection_density(z, k * q, sp); };
  std::vector<double> cdf;
  const double dq = 1e-3;
  double mass = 0.0;
  double prev = density(0.0);
  for (double q = dq; q <= 60.0; q += dq) {
    const double cur = density(q);
    mass += 0.5 * (prev + cur) * dq;
    cdf.push_back(mass);
    prev = cur;
  }
  const auto quantile = [&](double p) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), p * mass);
    return static_cast<double>(it - cdf.begin() + 1) * dq;
  };

  auto rng = dcee::make_rng(8);
  ParticleSet ps = dcee::sample_prior(spec, 2000, rng);
  for (int sweep = 0; sweep < 60; ++sweep) {
    ps = dcee::mcmc_move(ps, h, spec, sp, rng).particles;
  }
  const double n = static_cast<double>(ps.size());
  for (const double p : {0.25, 0.5, 0.75}) {
    const double q = quantile(p);
    const double below = static_cast<double>(std::count_if(ps.particles.begin(), ps.particles.end(),
                                                           [&](const SourceTerm& t) { return t.release_rate < q; }));
    EXPECT_NEAR(below / n, p, 3.0 * std::sqrt(p * (1.0 - p) / n)) << "quantile " << p;
  }
}

TEST(Summaries, MeanAndTraceByDoubleLoop) {
  ParticleSet ps = uniform_set({truth(), truth(), truth(), truth()});
  ps.particles[0].source = {1.0, 2.0, 0.5};
  ps.particles[1].source = {4.0, -1.0, 2.0};
  ps.particles[2].source = {0.0, 0.0, 1.0};
  ps.particles[3].source = {3.0, 5.0, 3.5};
  ps.weights = {0.1, 0.4, 0.3, 0.2};
  // trace P = (1/2) sum_i sum_j w_i w_j |s_i - s_j|^2
  double trace = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      trace += 0.5 * ps.weights[i] * ps.weights[j] * dcee::squared_distance(ps.particles[i].source, ps.particles[j].source);
    }
  }
  EXPECT_NEAR(dcee::spatial_covariance_trace(ps), trace, 1e-12);
  const auto cov = dcee::parameter_covariance(ps);
  EXPECT_NEAR(cov(0, 0) + cov(1, 1) + cov(2, 2), trace, 1e-12);
  const auto mean = dcee::posterior_mean(ps);
  EXPECT_NEAR(mean.source.x, 0.1 * 1.0 + 0.4 * 4.0 + 0.2 * 3.0, 1e-12);
}

TEST(Summaries, CircularWindMean) {
  ParticleSet ps = uniform_set({truth(), truth()});
  ps.particles[0].wind_dir = dcee::deg_to_rad(350.0);
  ps.particles[1].wind_dir = dcee::deg_to_rad(20.0);
  EXPECT_NEAR(dcee::rad_to_deg(dcee::posterior_mean(ps).wind_dir), 5.0, 1e-9);
  const auto cov = dcee::parameter_covariance(ps);
  const int w = static_cast<int>(dcee::Param::kWindDir);
  EXPECT_NEAR(cov(w, w), std::pow(dcee::deg_to_rad(15.0), 2), 1e-12);
}

TEST(ParticleSetValidate, Rejects) {
  ParticleSet ps = uniform_set({truth(), truth()});
  EXPECT_NO_THROW(dcee::validate(ps));
  ps.weights = {0.5, 0.6};
  EXPECT_THROW(dcee::validate(ps), dcee::InvalidParameter);
  ps.weights = {0.5};
  EXPECT_THROW(dcee::validate(ps), dcee::InvalidParameter);
}

}  // namespace
