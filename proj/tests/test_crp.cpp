#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "dcsbm/crp.hpp"
#include "dcsbm/rng.hpp"
#include "oracles.hpp"

using dcsbm::Concentration;
using dcsbm::CrpState;
using dcsbm::CrpWeights;
using dcsbm::RandomSource;

TEST_SUITE("crp") {

TEST_CASE("prior weights exclude the unit itself") {
  // 34 units: 11 in the first cluster, 23 in the second.
  std::vector<int> labels(34, 2);
  std::vector<double> vals{0.1, 0.2};
  for (int u = 0; u < 11; ++u) labels[u] = 1;
  CrpState s = CrpState::from_assignments(labels, vals);
  Concentration conc;
  conc.value = 0.7;

  CrpWeights w = dcsbm::crp_prior_weights(s, 0, conc);
  REQUIRE(w.slot.size() == 2);
  CHECK(w.weight[0] == 10.0);  // own cluster minus itself
  CHECK(w.weight[1] == 23.0);
  CHECK(w.new_cluster_weight == 0.7);

  CrpWeights w2 = dcsbm::crp_prior_weights(s, 20, conc);
  CHECK(w2.weight[0] == 11.0);
  CHECK(w2.weight[1] == 22.0);
}

TEST_CASE("a singleton's own slot gets weight zero") {
  CrpState s = CrpState::from_assignments({1, 2, 2}, {0.0, 0.0});
  Concentration conc;
  CrpWeights w = dcsbm::crp_prior_weights(s, 0, conc);
  REQUIRE(w.slot.size() == 2);
  CHECK(w.weight[0] == 0.0);
  CHECK(w.weight[1] == 2.0);
}

TEST_CASE("a pending unit sees full counts") {
  CrpState s = CrpState::all_pending(3);
  Concentration conc;
  conc.value = 1.5;
  CrpWeights w0 = dcsbm::crp_prior_weights(s, 0, conc);
  CHECK(w0.slot.empty());
  CHECK(w0.new_cluster_weight == 1.5);

  s.assign_new_cluster(0, 0.0);
  CrpWeights w1 = dcsbm::crp_prior_weights(s, 1, conc);
  REQUIRE(w1.slot.size() == 1);
  CHECK(w1.weight[0] == 1.0);
}

TEST_CASE("two units sharing a cluster weight each other once") {
  CrpState s = CrpState::single_cluster(2, 0.3);
  Concentration conc;
  conc.value = 2.0;
  CrpWeights w = dcsbm::crp_prior_weights(s, 0, conc);
  REQUIRE(w.slot.size() == 1);
  CHECK(w.weight[0] == 1.0);
  CHECK(w.new_cluster_weight == 2.0);
}

TEST_CASE("remove_if_singleton kills only singletons") {
  CrpState s = CrpState::from_assignments({1, 1, 2}, {0.5, -0.5});
  CHECK_FALSE(s.remove_if_singleton(0));
  CHECK(s.assignment(0) >= 0);        // stays put, caller excludes it
  CHECK(s.count(s.assignment(0)) == 2);
  CHECK(s.live_clusters() == 2);

  CHECK(s.remove_if_singleton(2));
  CHECK(s.assignment(2) == -1);
  CHECK(s.live_clusters() == 1);
  CHECK(s.counts_consistent());
}

TEST_CASE("move retires emptied clusters and recycles their slots") {
  CrpState s = CrpState::from_assignments({1, 2, 2}, {1.0, 2.0});
  const int target = s.assignment(1);
  s.move(0, target);  // cluster of unit 0 dies
  CHECK(s.live_clusters() == 1);
  CHECK(s.count(target) == 3);
  CHECK(s.counts_consistent());

  const int fresh = s.assign_new_cluster(2, 9.0);
  CHECK(s.live_clusters() == 2);
  CHECK(s.count(fresh) == 1);
  CHECK(s.value(fresh) == 9.0);
  CHECK(s.count(target) == 2);
  CHECK(s.counts_consistent());
  CHECK(s.slots() == 2);  // the tombstone was recycled, not appended
}

TEST_CASE("compact renumbers by first appearance and keeps the partition") {
  CrpState s = CrpState::from_assignments({1, 2, 3, 2, 1}, {10.0, 20.0, 30.0});
  s.move(2, s.assignment(0));  // third cluster dies, leaving a tombstone
  const auto labels_before = s.labels_contiguous();
  const auto values_before = s.values_contiguous();
  s.compact();
  CHECK(s.labels_contiguous() == labels_before);
  CHECK(s.values_contiguous() == values_before);
  CHECK(s.slots() == s.live_clusters());
  CHECK(s.counts_consistent());
}

TEST_CASE("from_assignments follows first-appearance order") {
  CrpState s = CrpState::from_assignments({3, 1, 3, 2}, {0.3, 0.1, 0.2});
  CHECK(s.labels_contiguous() == std::vector<int>{1, 2, 1, 3});
  CHECK(s.values_contiguous() == std::vector<double>{0.3, 0.1, 0.2});
  CHECK(s.live_clusters() == 3);
  CHECK_THROWS(CrpState::from_assignments({1, 2}, {0.0}));
}

TEST_CASE("random edit sequences keep the bookkeeping consistent") {
  RandomSource rng(71, 0);
  CrpState s = CrpState::single_cluster(12, 0.0);
  for (int step = 0; step < 3000; ++step) {
    const int u = static_cast<int>(rng.uniform() * 12);
    if (rng.uniform() < 0.3) {
      s.assign_new_cluster(u, rng.std_normal());
    } else {
      std::vector<int> live;
      for (int k = 0; k < s.slots(); ++k)
        if (s.live(k)) live.push_back(k);
      s.move(u, live[static_cast<int>(rng.uniform() * live.size())]);
    }
    REQUIRE(s.counts_consistent());
    const auto lab = s.labels_contiguous();
    int maxseen = 0;  // contiguous labels grow one at a time from 1
    for (int v : lab) {
      REQUIRE(v >= 1);
      REQUIRE(v <= maxseen + 1);
      maxseen = std::max(maxseen, v);
    }
    CHECK(maxseen == s.live_clusters());
    if (step % 500 == 499) {
      const auto values = s.values_contiguous();
      s.compact();
      CHECK(s.labels_contiguous() == lab);
      CHECK(s.values_contiguous() == values);
    }
  }
}

TEST_CASE("concentration mixture odds match the closed form") {
  // shape=rate=5, 4 live clusters among 34 units, auxiliary draw 0.5.
  const double odds = dcsbm::escobar_west_odds(5.0, 5.0, 4, 34, 0.5);
  CHECK(odds == doctest::Approx(8.0 / (34.0 * (5.0 - std::log(0.5)))).epsilon(1e-12));
  CHECK(odds == doctest::Approx(0.041329).epsilon(1e-4));
  CHECK(odds / (1.0 + odds) == doctest::Approx(0.039689).epsilon(1e-4));

  // As the auxiliary variable approaches 1 the log vanishes.
  CHECK(dcsbm::escobar_west_odds(5.0, 5.0, 4, 34, 1.0 - 1e-15) ==
        doctest::Approx(8.0 / 170.0).epsilon(1e-9));
}

TEST_CASE("concentration chain converges to the quadrature posterior mean") {
  // With the partition frozen at k clusters among n units, iterating the
  // auxiliary update is a two-block Gibbs chain whose stationary law is
  // p(conc | k) proportional to conc^(a+k-1) e^(-b conc) G(conc)/G(conc+n).
  const double a = 5.0, b = 5.0;
  const int k = 4, n = 34;
  auto dens = [&](double x) {
    return std::exp((a + k - 1.0) * std::log(x) - b * x + std::lgamma(x) -
                    std::lgamma(x + n));
  };
  const double z0 = oracle::simpson(dens, 1e-9, 25.0, 40000);
  const double m1 = oracle::simpson([&](double x) { return x * dens(x); },
                                    1e-9, 25.0, 40000) / z0;

  RandomSource rng(79, 0);
  Concentration conc;
  conc.value = 1.0;
  conc.prior_shape = a;
  conc.prior_rate = b;
  double sum = 0.0;
  const int burn = 2000, keep = 150000;
  for (int i = 0; i < burn; ++i) conc = dcsbm::update_concentration(rng, conc, k, n);
  for (int i = 0; i < keep; ++i) {
    conc = dcsbm::update_concentration(rng, conc, k, n);
    sum += conc.value;
  }
  CHECK(std::fabs(sum / keep - m1) < 0.02);
  CHECK_THROWS(dcsbm::update_concentration(rng, conc, 0, 10));
}

TEST_CASE("sequential prior draws produce the exact cluster-count law") {
  // n=3, conc=1: P(K=1)=1/3, P(K=2)=1/2, P(K=3)=1/6 (Stirling numbers over
  // the rising factorial).
  RandomSource rng(83, 0);
  Concentration conc;
  conc.value = 1.0;
  const int N = 60000;
  std::map<int, long> hist;
  for (int i = 0; i < N; ++i) {
    CrpState s = dcsbm::crp_prior_draw(rng, 3, conc, 1.0);
    REQUIRE(s.counts_consistent());
    ++hist[s.live_clusters()];
  }
  const double want[4] = {0.0, 1.0 / 3.0, 0.5, 1.0 / 6.0};
  double tv = 0.0;
  for (int kk = 1; kk <= 3; ++kk)
    tv += 0.5 * std::fabs(static_cast<double>(hist[kk]) / N - want[kk]);
  CHECK(tv < 0.01);
}

TEST_CASE("prior draws give clusters iid values with the requested moments") {
  RandomSource rng(89, 0);
  Concentration conc;
  conc.value = 1.0;
  double s1 = 0.0, s2 = 0.0;
  long cnt = 0;
  for (int i = 0; i < 20000; ++i) {
    CrpState s = dcsbm::crp_prior_draw(rng, 1, conc, 0.25, 2.0);
    const double v = s.value(s.assignment(0));
    s1 += v;
    s2 += v * v;
    ++cnt;
  }
  const double m = s1 / cnt;
  CHECK(m == doctest::Approx(2.0).epsilon(0.01));
  CHECK(s2 / cnt - m * m == doctest::Approx(0.25).epsilon(0.05));
}

} // TEST_SUITE
