// Copyright 2026 The sznet Authors.
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

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <set>

#include "sznet/error.hpp"
#include "sznet/extract.hpp"
#include "sznet/features.hpp"
#include "sznet/pattern_set.hpp"
#include "sznet/synth.hpp"

using namespace sznet;

namespace {

constexpr double kPi = std::numbers::pi;

double oracle_plv(const Eigen::VectorXd& phi) {
  std::complex<double> sum = 0.0;
  for (Eigen::Index k = 0; k < phi.size(); ++k) sum += std::polar(1.0, phi[k]);
  return std::abs(sum) / static_cast<double>(phi.size());
}

Eigen::VectorXd random_phases(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

// Random phases per band for n channels over t samples.
std::vector<SampleMatrix> random_band_phases(Eigen::Index n, Eigen::Index t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<SampleMatrix> out(kNumBands, SampleMatrix(n, t));
  for (auto& m : out) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  }
  return out;
}

SampleMatrix random_signals(Eigen::Index n, Eigen::Index t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 10.0);
  SampleMatrix m(n, t);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

}  // namespace

TEST_CASE("relative phases wrap and are antisymmetric") {
  Eigen::VectorXd a(3);
  Eigen::VectorXd b(3);
  a << 3.0, 0.5, -1.0;
  b << -3.0, 0.5, 2.0;
  const auto d = relative_phases(a, b);
  CHECK(d[0] == doctest::Approx(6.0 - 2.0 * kPi).epsilon(1e-15));
  CHECK(d[0] == doctest::Approx(-0.2832).epsilon(1e-4));
  CHECK(d[1] == 0.0);
  CHECK(relative_phases(a, a).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(1);
  const auto x = random_phases(500, rng);
  const auto y = random_phases(500, rng);
  const auto xy = relative_phases(x, y);
  const auto yx = relative_phases(y, x);
  for (Eigen::Index i = 0; i < xy.size(); ++i) {
    CHECK(xy[i] > -kPi);
    CHECK(xy[i] <= kPi);
    if (std::abs(xy[i]) < kPi - 1e-12) CHECK(yx[i] == doctest::Approx(-xy[i]));
  }
  CHECK_THROWS_AS(relative_phases(x, Eigen::VectorXd(x.head(10))), ValidationError);
}

TEST_CASE("wrap_phase maps -pi to pi") {
  CHECK(wrap_phase(-kPi) == kPi);
  CHECK(wrap_phase(kPi) == kPi);
  CHECK(wrap_phase(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(0.25) == 0.25);
}

TEST_CASE("PLV closed forms and oracle") {
  CHECK(plv(Eigen::VectorXd::Constant(100, 1.3)) == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::VectorXd roots(64);
  for (Eigen::Index n = 0; n < 64; ++n) roots[n] = 2.0 * kPi * double(n) / 64.0;
  CHECK(std::abs(plv(roots)) < 1e-12);
  Eigen::VectorXd three(3);
  three << 0.0, kPi / 2.0, kPi;
  CHECK(plv(three) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(plv(Eigen::VectorXd()), ValidationError);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> conc(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x = random_phases(50 + trial, rng) * (conc(rng) / 3.0);
    const double v = plv(x);
    CHECK(std::abs(v - oracle_plv(x)) < 1e-12);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    const Eigen::VectorXd neg = -x;
    const Eigen::VectorXd shifted = (x.array() + 0.7).matrix();
    CHECK(std::abs(plv(neg) - v) < 1e-12);
    CHECK(std::abs(plv(shifted) - v) < 1e-12);
  }
}

TEST_CASE("entropy rho closed forms") {
  CHECK(default_entropy_bins(250) == 16);
  const int k = 4;
  CHECK(phase_entropy_rho(Eigen::VectorXd::Constant(20, 0.1), k) == doctest::Approx(1.0).epsilon(1e-12));
  // Bin centres are multiples of 2pi/K.
  Eigen::VectorXd uniform(4 * 5);
  for (Eigen::Index i = 0; i < uniform.size(); ++i) {
    uniform[i] = wrap_phase(2.0 * kPi * double(i % 4) / 4.0);
  }
  CHECK(std::abs(phase_entropy_rho(uniform, k)) < 1e-12);
  Eigen::VectorXd two(4);
  two << 0.0, 0.0, kPi / 2.0, kPi / 2.0;
  CHECK(phase_entropy_rho(two, k) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(phase_entropy_rho(Eigen::VectorXd(), k), ValidationError);
  CHECK_THROWS_AS(phase_entropy_rho(two, 1), ValidationError);
}

TEST_CASE("entropy rho is bounded, permutation invariant and negation symmetric") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x = random_phases(250, rng) * ((trial % 10) / 9.0);
    const int bins = 2 + trial % 20;
    const double r = phase_entropy_rho(x, bins);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    Eigen::VectorXd perm = x;
    std::shuffle(perm.data(), perm.data() + perm.size(), rng);
    CHECK(phase_entropy_rho(perm, bins) == r);
    const Eigen::VectorXd neg = -x;
    CHECK(phase_entropy_rho(neg, bins) == r);
  }
  // Values exactly on bin edges still negate symmetrically.
  Eigen::VectorXd edges(8);
  for (Eigen::Index i = 0; i < 8; ++i) edges[i] = wrap_phase((double(i) + 0.5) * 2.0 * kPi / 8.0);
  CHECK(phase_entropy_rho(edges, 8) == phase_entropy_rho(Eigen::VectorXd(-edges), 8));
}

TEST_CASE("pattern dimensions for ten channels") {
  const auto phases = random_band_phases(10, 250, 4);
  const auto p = build_phase_pattern(phases, FeatureFamily::kPlv, 16);
  CHECK(p.values.rows() == 70);
  CHECK(p.values.cols() == 10);
  std::set<double> distinct;
  for (Eigen::Index b = 0; b < 7; ++b) {
    std::set<double> block;
    for (Eigen::Index i = 0; i < 10; ++i) {
      for (Eigen::Index j = i + 1; j < 10; ++j) block.insert(p.values(b * 10 + i, j));
    }
    CHECK(block.size() == 45);
    distinct.insert(block.begin(), block.end());
  }
  CHECK(distinct.size() == 315);

  const auto e = build_phase_pattern(phases, FeatureFamily::kEntropy, 16);
  const PatternMatrix parts[] = {p, e};
  const auto stacked = stack_patterns(parts);
  CHECK(stacked.values.rows() == 70);
  CHECK(stacked.values.cols() == 20);
  CHECK(stacked.families == std::vector<FeatureFamily>{FeatureFamily::kPlv, FeatureFamily::kEntropy});
  const PatternMatrix one[] = {p};
  CHECK(stack_patterns(one).values == p.values);
}

TEST_CASE("pattern blocks are symmetric with documented diagonals") {
  const auto phases = random_band_phases(5, 250, 5);
  const auto raw = random_signals(5, 250, 6);
  EpochFeatureInput in{phases, raw, 250.0};
  for (const auto f : {FeatureFamily::kPlv, FeatureFamily::kEnergy, FeatureFamily::kEntropy}) {
    const auto p = build_family_pattern(in, f, kDefaultBands, 16);
    REQUIRE(p.values.rows() == 35);
    REQUIRE(p.values.cols() == 5);
    for (Eigen::Index b = 0; b < 7; ++b) {
      const Eigen::MatrixXd block = p.values.middleRows(b * 5, 5);
      CHECK(block == block.transpose());
      if (f != FeatureFamily::kEnergy) {
        CHECK(block.diagonal() == Eigen::VectorXd::Ones(5));
        CHECK(block.minCoeff() >= 0.0);
        CHECK(block.maxCoeff() <= 1.0);
      }
    }
  }

  const auto energy = build_energy_pattern(raw, 250.0, kDefaultBands);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const Eigen::VectorXd xi = raw.row(i).transpose();
    const auto own = band_log_power(periodogram(xi, 250.0), kDefaultBands);
    for (Eigen::Index j = 0; j < 5; ++j) {
      const Eigen::VectorXd d = (raw.row(i) - raw.row(j)).transpose();
      const auto pair = band_log_power(periodogram(d, 250.0), kDefaultBands);
      for (Eigen::Index b = 0; b < 7; ++b) {
        CHECK(energy.values(b * 5 + i, j) == doctest::Approx(i == j ? own[b] : pair[b]));
      }
    }
  }
}

TEST_CASE("doubling both channels raises energy entries by ln 4") {
  const auto raw = random_signals(4, 250, 7);
  const auto a = build_energy_pattern(raw, 250.0, kDefaultBands);
  const SampleMatrix twice = 2.0 * raw;
  const auto b = build_energy_pattern(twice, 250.0, kDefaultBands);
  const Eigen::MatrixXd diff = b.values - a.values;
  CHECK((diff.array() - std::log(4.0)).abs().maxCoeff() < 1e-9);
}

TEST_CASE("pattern construction errors") {
  const auto one = random_band_phases(1, 250, 8);
  CHECK_THROWS_AS(build_phase_pattern(one, FeatureFamily::kPlv, 16), ValidationError);
  const auto p4 = build_phase_pattern(random_band_phases(4, 250, 9), FeatureFamily::kPlv, 16);
  const auto p5 = build_phase_pattern(random_band_phases(5, 250, 9), FeatureFamily::kEntropy, 16);
  const PatternMatrix mismatch[] = {p4, p5};
  CHECK_THROWS_AS(stack_patterns(mismatch), ValidationError);
  const auto e4 = build_phase_pattern(random_band_phases(4, 250, 9), FeatureFamily::kEntropy, 16);
  const PatternMatrix reversed[] = {e4, p4};
  CHECK_THROWS_AS(stack_patterns(reversed), ValidationError);
  CHECK_THROWS_AS(canonical_families({FeatureFamily::kPlv, FeatureFamily::kPlv}), ValidationError);
  CHECK(canonical_families({FeatureFamily::kEntropy, FeatureFamily::kPlv, FeatureFamily::kEnergy}) ==
        std::vector<FeatureFamily>{FeatureFamily::kPlv, FeatureFamily::kEnergy, FeatureFamily::kEntropy});
  CHECK(family_from_name("PLV") == FeatureFamily::kPlv);
  CHECK_THROWS_AS(family_from_name("coherence"), ValidationError);
}

TEST_CASE("normalisation") {
  std::vector<Eigen::MatrixXd> set;
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal(3.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    Eigen::MatrixXd m(3, 2);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    m(2, 1) = 7.0;  // constant entry
    set.push_back(m);
  }
  auto copy = set;
  const auto stats = normalize_patterns(copy);
  CHECK(stats.stddev(2, 1) == kStdFloor);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(3, 2);
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(3, 2);
  for (const auto& m : copy) {
    mean += m;
    sq += m.cwiseProduct(m);
  }
  mean /= 50.0;
  sq /= 50.0;
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index i = 0; i < 6; ++i) {
    if (i == 5) continue;  // (2,1) in column-major order
    CHECK(sq.data()[i] == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (const auto& m : copy) CHECK(m(2, 1) == 0.0);

  // Applying stored statistics again changes the set: not idempotent.
  auto twice = copy;
  normalize_patterns(twice, &stats);
  CHECK((twice[0] - copy[0]).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("synthetic seizure coupling raises PLV and full coupling saturates it") {
  SynthConfig c;
  c.duration_s = 240.0;
  c.seizures = {{20.0, 140.0, SeizureType::kFocalNonSpecific}};
  const auto [rec, labels] = synthesize_recording(c);
  ExtractOptions opts;
  opts.families = {FeatureFamily::kPlv};
  const auto set = extract_patterns(rec, labels, opts);
  REQUIRE(set.size() == 240);

  // Welch t-test on mean off-diagonal alpha PLV per epoch.
  std::vector<double> sz;
  std::vector<double> bg;
  for (std::size_t e = 0; e < set.size(); ++e) {
    const auto& m = set.patterns[e];
    double s = 0.0;
    int cnt = 0;
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = i + 1; j < 4; ++j, ++cnt) s += m(2 * 4 + i, j);
    }
    (set.epochs[e].label != 0 ? sz : bg).push_back(s / cnt);
  }
  auto moments = [](const std::vector<double>& v) {
    double m = 0.0;
    for (const double x : v) m += x;
    m /= double(v.size());
    double var = 0.0;
    for (const double x : v) var += (x - m) * (x - m);
    return std::pair{m, var / double(v.size() - 1)};
  };
  const auto [ms, vs] = moments(sz);
  const auto [mb, vb] = moments(bg);
  const double t = (ms - mb) / std::sqrt(vs / double(sz.size()) + vb / double(bg.size()));
  CHECK(sz.size() + bg.size() >= 200);
  CHECK(t > 2.33);  // one-sided 1% level

  SynthConfig locked;
  locked.duration_s = 10.0;
  locked.noise_uv = 0.0;
  locked.phase_noise = 0.0;
  locked.seizure.coupling.fill(1.0);
  locked.seizures = {{0.0, 10.0, SeizureType::kFocalNonSpecific}};
  const auto [lr, ll] = synthesize_recording(locked);
  const auto lset = extract_patterns(lr, ll, opts);
  for (int e = 3; e < 7; ++e) {
    const auto& m = lset.patterns[static_cast<std::size_t>(e)];
    for (Eigen::Index b = 0; b < 7; ++b) {
      for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) CHECK(m(b * 4 + i, j) >= 0.99);
      }
    }
  }
}

TEST_CASE("extraction shapes and family selection") {
  SynthConfig c;
  c.n_channels = 10;
  c.duration_s = 6.0;
  c.seizures = {{2.0, 4.0, SeizureType::kAbsence}};
  const auto [rec, labels] = synthesize_recording(c);
  ExtractOptions plv_only;
  plv_only.families = {FeatureFamily::kPlv};
  const auto a = extract_patterns(rec, labels, plv_only);
  REQUIRE(a.size() == 6);
  CHECK(a.patterns[0].rows() == 70);
  CHECK(a.patterns[0].cols() == 10);
  CHECK(a.epochs[2].label == code(SeizureType::kAbsence));
  CHECK(a.epochs[5].label == 0);

  const auto all = extract_patterns(rec, labels);
  CHECK(all.patterns[0].cols() == 30);
  const auto sel = all.select_families({FeatureFamily::kPlv});
  for (std::size_t e = 0; e < all.size(); ++e) {
    CHECK((sel.patterns[e] - a.patterns[e]).cwiseAbs().maxCoeff() == 0.0);
  }
  const auto pe = all.select_families({FeatureFamily::kEntropy, FeatureFamily::kPlv});
  CHECK(pe.families == std::vector<FeatureFamily>{FeatureFamily::kPlv, FeatureFamily::kEntropy});
  CHECK(pe.patterns[0].rows() == 70);
  CHECK(pe.patterns[0].cols() == 20);

  ExtractOptions energy_only;
  energy_only.families = {FeatureFamily::kEnergy};
  const auto en = extract_patterns(rec, labels, energy_only);
  CHECK((en.patterns[1] - all.select_families({FeatureFamily::kEnergy}).patterns[1])
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("pattern container round trip and corruption") {
  PatternSet set;
  set.n_channels = 2;
  set.families = {FeatureFamily::kPlv, FeatureFamily::kEnergy};
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  for (int e = 0; e < 5; ++e) {
    PatternMatrix p;
    p.values.resize(14, 4);
    for (Eigen::Index i = 0; i < p.values.size(); ++i) p.values.data()[i] = normal(rng);
    p.families = set.families;
    p.n_channels = 2;
    set.append(p, EpochRef{e < 3 ? "alpha" : "beta", e, e % 2});
  }
  const auto bytes = serialize_patterns(set);
  CHECK(bytes.substr(0, 8) == "SZPATSET");
  const auto back = deserialize_patterns(bytes);
  REQUIRE(back.size() == 5);
  CHECK(back.families == set.families);
  CHECK(back.n_channels == 2);
  for (std::size_t e = 0; e < 5; ++e) {
    CHECK(back.epochs[e].patient_id == set.epochs[e].patient_id);
    CHECK(back.epochs[e].epoch_index == set.epochs[e].epoch_index);
    CHECK(back.epochs[e].label == set.epochs[e].label);
    const Eigen::MatrixXd as_float = set.patterns[e].cast<float>().cast<double>();
    CHECK(back.patterns[e] == as_float);
  }
  CHECK(serialize_patterns(back) == bytes);

  CHECK_THROWS_AS(deserialize_patterns(bytes.substr(0, bytes.size() - 3)), ParseError);
  CHECK_THROWS_AS(deserialize_patterns(bytes + "x"), ParseError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_patterns(bad_magic), ParseError);

  PatternMatrix wrong;
  wrong.values = Eigen::MatrixXd::Zero(14, 2);
  wrong.families = {FeatureFamily::kPlv};
  wrong.n_channels = 2;
  CHECK_THROWS_AS(set.append(wrong, {}), ValidationError);
}
