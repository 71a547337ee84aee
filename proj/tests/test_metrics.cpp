#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "gaudit/errors.hpp"
#include "gaudit/lexicon.hpp"
#include "gaudit/metrics.hpp"
#include "gaudit/probes.hpp"

using namespace gaudit;
using namespace gaudit::metrics;

namespace {

const lexicon::Lexicon& lex() {
  static const lexicon::Lexicon instance =
      lexicon::load_lexicon_file(std::string(GAUDIT_DATA_DIR) + "/lexicon.json");
  return instance;
}

using ProbTable = std::map<std::pair<std::string, std::string>, double>;

// Aggregates straight from the definition, reading the probability table
// directly instead of score records. Alignment is decided by comparing the
// printed enum names, a separate path from the production delta.
double oracle_folk(const ProbTable& p, const std::vector<std::string>& identifiers) {
  double total = 0.0;
  for (const auto& g_term : identifiers) {
    const auto* g = lex().find_gender_identifier(g_term);
    REQUIRE(g != nullptr);
    for (const auto& s : lex().sex_characteristics) {
      const bool aligned =
          lexicon::to_string(g->folk_alignment) == lexicon::to_string(s.polarity);
      const double lp = std::log(p.at({s.term, g_term}));
      total += aligned ? lp : -lp;
    }
  }
  return total / static_cast<double>(identifiers.size());
}

double oracle_folk_balanced(const ProbTable& p,
                            const std::vector<std::string>& identifiers) {
  double folk_sum = 0.0, other_sum = 0.0;
  double folk_n = 0.0, other_n = 0.0;
  for (const auto& g_term : identifiers) {
    const auto* g = lex().find_gender_identifier(g_term);
    for (const auto& s : lex().sex_characteristics) {
      const bool aligned =
          lexicon::to_string(g->folk_alignment) == lexicon::to_string(s.polarity);
      const double lp = std::log(p.at({s.term, g_term}));
      if (aligned) {
        folk_sum += lp;
        folk_n += 1.0;
      } else {
        other_sum += lp;
        other_n += 1.0;
      }
    }
  }
  return folk_sum / folk_n - other_sum / other_n;
}

std::vector<std::string> all_identifiers() {
  std::vector<std::string> out;
  for (const auto& g : lex().gender_identifiers) out.push_back(g.term);
  return out;
}

scoring::ScoreRecord record_for(probes::Suite suite, const std::string& ctx_key,
                                const std::string& comp_key, double prob) {
  scoring::ScoreRecord r;
  r.model_id = "metric-test";
  r.probe = probes::Probe{suite, "ctx(" + ctx_key + ")", comp_key, ctx_key, comp_key};
  r.log_prob = std::log(prob);
  r.token_count = 1;
  return r;
}

// One record per (sex term, gender identifier) cell.
std::vector<scoring::ScoreRecord> sex_gender_records(const ProbTable& p) {
  std::vector<scoring::ScoreRecord> out;
  for (const auto& s : lex().sex_characteristics)
    for (const auto& g : lex().gender_identifiers)
      out.push_back(record_for(probes::Suite::sex_gender, s.term, g.term,
                               p.at({s.term, g.term})));
  return out;
}

ProbTable uniform_table(double prob) {
  ProbTable p;
  for (const auto& s : lex().sex_characteristics)
    for (const auto& g : lex().gender_identifiers) p[{s.term, g.term}] = prob;
  return p;
}

ProbTable random_table(std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(5e-4, 0.9995);
  ProbTable p;
  for (const auto& s : lex().sex_characteristics)
    for (const auto& g : lex().gender_identifiers) p[{s.term, g.term}] = dist(rng);
  return p;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("folk lpr matches the oracle on random tables") {
  std::mt19937 rng(1006);
  const auto ids = all_identifiers();
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = random_table(rng);
    const auto records = sex_gender_records(p);
    const auto res = folk_subversive_lpr(records, lex());
    CHECK(std::fabs(res.value - oracle_folk(p, ids)) <= 1e-9);
    CHECK(res.components.size() == 70);
    CHECK(res.divisor == 7.0);
    CHECK(res.model_id == "metric-test");
  }
}

TEST_CASE("folk lpr subset restriction matches the oracle") {
  std::mt19937 rng(1007);
  const std::vector<std::vector<std::string>> subsets = {
      {"a man"},
      {"a woman"},
      {"transgender"},
      {"a man", "a woman"},
      {"transgender", "nonbinary", "genderqueer", "genderfluid", "two-spirit"},
  };
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_table(rng);
    const auto records = sex_gender_records(p);
    for (const auto& subset : subsets) {
      const auto res = folk_subversive_lpr(records, lex(), subset);
      CHECK(std::fabs(res.value - oracle_folk(p, subset)) <= 1e-9);
      CHECK(res.divisor == static_cast<double>(subset.size()));
      CHECK(res.components.size() == subset.size() * 10);
    }
  }
}

TEST_CASE("folk lpr pinned values") {
  SUBCASE("uniform 1/e probabilities give 50/7") {
    const auto records = sex_gender_records(uniform_table(std::exp(-1.0)));
    const auto res = folk_subversive_lpr(records, lex());
    CHECK(std::fabs(res.value - 50.0 / 7.0) <= 1e-9);
  }
  SUBCASE("certain predictions give exactly zero") {
    const auto records = sex_gender_records(uniform_table(1.0));
    CHECK(folk_subversive_lpr(records, lex()).value == 0.0);
  }
  SUBCASE("uniform 1/e restricted to one binary identifier cancels") {
    const auto records = sex_gender_records(uniform_table(std::exp(-1.0)));
    const auto res =
        folk_subversive_lpr(records, lex(), std::vector<std::string>{"a man"});
    CHECK(std::fabs(res.value) <= 1e-12);
  }
  SUBCASE("uniform 1/e restricted to a subversive identifier gives 10") {
    const auto records = sex_gender_records(uniform_table(std::exp(-1.0)));
    const auto res =
        folk_subversive_lpr(records, lex(), std::vector<std::string>{"two-spirit"});
    CHECK(std::fabs(res.value - 10.0) <= 1e-12);
  }
}

TEST_CASE("folk lpr moves in the right direction") {
  auto p = uniform_table(0.1);
  const double base = folk_subversive_lpr(sex_gender_records(p), lex()).value;

  auto up_aligned = p;
  up_aligned[{"male", "a man"}] = 0.4;  // aligned cell more likely
  CHECK(folk_subversive_lpr(sex_gender_records(up_aligned), lex()).value > base);

  auto up_crossed = p;
  up_crossed[{"male", "a woman"}] = 0.4;  // crossed cell more likely
  CHECK(folk_subversive_lpr(sex_gender_records(up_crossed), lex()).value < base);

  auto up_subversive = p;
  up_subversive[{"male", "nonbinary"}] = 0.4;
  CHECK(folk_subversive_lpr(sex_gender_records(up_subversive), lex()).value < base);
}

TEST_CASE("folk lpr rejects bad subsets and missing scores") {
  const auto records = sex_gender_records(uniform_table(0.5));
  CHECK_THROWS_AS(
      folk_subversive_lpr(records, lex(), std::vector<std::string>{"a wizard"}),
      DomainError);
  CHECK_THROWS_AS(folk_subversive_lpr(records, lex(), std::vector<std::string>{}),
                  DomainError);

  auto partial = records;
  partial.pop_back();
  CHECK_THROWS_AS(folk_subversive_lpr(partial, lex()), MissingScoreError);
}

TEST_CASE("balanced variant matches its oracle and is scale invariant") {
  std::mt19937 rng(1008);
  const auto ids = all_identifiers();
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = random_table(rng);
    const auto res = folk_subversive_lpr_balanced(sex_gender_records(p), lex());
    CHECK(std::fabs(res.value - oracle_folk_balanced(p, ids)) <= 1e-9);

    auto scaled = p;
    for (auto& [k, v] : scaled) v *= 0.5;
    const auto res2 = folk_subversive_lpr_balanced(sex_gender_records(scaled), lex());
    CHECK(std::fabs(res2.value - res.value) <= 1e-9);
  }
  SUBCASE("uniform probabilities balance to zero") {
    const auto res = folk_subversive_lpr_balanced(
        sex_gender_records(uniform_table(std::exp(-1.0))), lex());
    CHECK(std::fabs(res.value) <= 1e-12);
  }
  SUBCASE("an all-subversive subset has no folk side") {
    CHECK_THROWS_AS(
        folk_subversive_lpr_balanced(sex_gender_records(uniform_table(0.5)), lex(),
                                     std::vector<std::string>{"two-spirit"}),
        DomainError);
  }
}

TEST_CASE("sex gender lpr is the log ratio of matched contexts") {
  const auto& female = *lex().find_sex_characteristic("female");
  const auto& male = *lex().find_sex_characteristic("male");
  const auto& woman = *lex().find_gender_identifier("a woman");

  SUBCASE("pinned quarter ratio") {
    ProbTable p = uniform_table(0.5);
    p[{"female", "a woman"}] = 0.05;
    p[{"male", "a woman"}] = 0.2;
    const auto res = sex_gender_lpr(sex_gender_records(p), woman, female, male);
    CHECK(std::fabs(res.value - (-std::log(4.0))) <= 1e-9);
    CHECK(res.components.size() == 2);
  }
  SUBCASE("swapping the probabilities flips the sign") {
    std::mt19937 rng(1009);
    for (int rep = 0; rep < 25; ++rep) {
      auto p = random_table(rng);
      auto q = p;
      std::swap(q[{"female", "a woman"}], q[{"male", "a woman"}]);
      const auto a = sex_gender_lpr(sex_gender_records(p), woman, female, male);
      const auto b = sex_gender_lpr(sex_gender_records(q), woman, female, male);
      CHECK(std::fabs(a.value + b.value) <= 1e-9);
    }
  }
  SUBCASE("common scaling cancels") {
    std::mt19937 rng(1010);
    for (int rep = 0; rep < 25; ++rep) {
      auto p = random_table(rng);
      auto scaled = p;
      scaled[{"female", "a woman"}] *= 0.37;
      scaled[{"male", "a woman"}] *= 0.37;
      const auto a = sex_gender_lpr(sex_gender_records(p), woman, female, male);
      const auto b = sex_gender_lpr(sex_gender_records(scaled), woman, female, male);
      CHECK(std::fabs(a.value - b.value) <= 1e-9);
    }
  }
  SUBCASE("polarity arguments are checked") {
    const auto records = sex_gender_records(uniform_table(0.5));
    CHECK_THROWS_AS(sex_gender_lpr(records, woman, male, female), DomainError);
  }
  SUBCASE("every matched pair works across every identifier") {
    std::mt19937 rng(1011);
    const auto p = random_table(rng);
    const auto records = sex_gender_records(p);
    for (const auto& [f, m] : lexicon::matched_pairs(lex()))
      for (const auto& g : lex().gender_identifiers) {
        const auto res = sex_gender_lpr(records, g, *f, *m);
        const double expect = std::log(p.at({f->term, g.term})) -
                              std::log(p.at({m->term, g.term}));
        CHECK(std::fabs(res.value - expect) <= 1e-9);
      }
  }
}

TEST_CASE("gender illness lpr contrasts against the male identifier") {
  const auto& trans = *lex().find_gender_identifier("transgender");
  const auto& anxiety = *lex().find_illness("anxiety");

  auto records_for = [&](double p_g, double p_man) {
    std::vector<scoring::ScoreRecord> out;
    out.push_back(
        record_for(probes::Suite::gender_illness, "transgender", "anxiety", p_g));
    out.push_back(record_for(probes::Suite::gender_illness, "a man", "anxiety", p_man));
    return out;
  };

  SUBCASE("pinned quarter ratio") {
    const auto res = gender_illness_lpr(records_for(0.02, 0.08), trans, anxiety, lex());
    CHECK(std::fabs(res.value - (-std::log(4.0))) <= 1e-9);
  }
  SUBCASE("equal probabilities give zero") {
    const auto res = gender_illness_lpr(records_for(0.03, 0.03), trans, anxiety, lex());
    CHECK(std::fabs(res.value) <= 1e-12);
  }
  SUBCASE("random probabilities match the direct formula") {
    std::mt19937 rng(1012);
    std::uniform_real_distribution<double> dist(1e-3, 0.999);
    for (int rep = 0; rep < 50; ++rep) {
      const double pg = dist(rng), pm = dist(rng);
      const auto res = gender_illness_lpr(records_for(pg, pm), trans, anxiety, lex());
      CHECK(std::fabs(res.value - (std::log(pg) - std::log(pm))) <= 1e-9);
    }
  }
  SUBCASE("the male identifier cannot be contrasted with itself") {
    CHECK_THROWS_AS(gender_illness_lpr(records_for(0.1, 0.1), lex().male_identifier(),
                                       anxiety, lex()),
                    DomainError);
  }
  SUBCASE("a missing matched score is an error") {
    std::vector<scoring::ScoreRecord> only_g = {
        record_for(probes::Suite::gender_illness, "transgender", "anxiety", 0.1)};
    CHECK_THROWS_AS(gender_illness_lpr(only_g, trans, anxiety, lex()),
                    MissingScoreError);
  }
}

TEST_CASE("baseline median picks the middle order statistic") {
  auto build = [&](const std::vector<double>& logs) {
    std::vector<scoring::ScoreRecord> out;
    for (size_t i = 0; i < logs.size(); ++i) {
      auto r = record_for(probes::Suite::sex_baseline, "male",
                          "noun" + std::to_string(i), 0.5);
      r.log_prob = logs[i];
      out.push_back(r);
    }
    return out;
  };

  SUBCASE("shuffled ladder of 47") {
    std::vector<double> logs;
    for (int i = 1; i <= 47; ++i) logs.push_back(-static_cast<double>(i));
    std::mt19937 rng(1013);
    std::shuffle(logs.begin(), logs.end(), rng);
    const auto res = baseline_median(build(logs), "male");
    CHECK(res.value == -24.0);
    CHECK(res.components.size() == 47);
  }
  SUBCASE("constant logs median to the constant") {
    const std::vector<double> logs(47, -5.0);
    CHECK(baseline_median(build(logs), "male").value == -5.0);
  }
  SUBCASE("a wrong count is an error") {
    std::vector<double> logs(46, -1.0);
    CHECK_THROWS_AS(baseline_median(build(logs), "male"), MissingScoreError);
    logs.assign(48, -1.0);
    CHECK_THROWS_AS(baseline_median(build(logs), "male"), MissingScoreError);
    CHECK_THROWS_AS(baseline_median(build({}), "absent"), MissingScoreError);
  }
  SUBCASE("other contexts do not leak in") {
    std::vector<double> logs(47, -2.0);
    auto records = build(logs);
    auto stray = record_for(probes::Suite::sex_baseline, "female", "noun0", 0.9);
    records.push_back(stray);
    const auto res = baseline_median(records, "male");
    CHECK(res.components.size() == 47);
    CHECK(res.value == -2.0);
  }
}

TEST_CASE("recompute reproduces the reported value bit for bit") {
  std::mt19937 rng(1014);
  const auto& female = *lex().find_sex_characteristic("female");
  const auto& male = *lex().find_sex_characteristic("male");
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_table(rng);
    const auto records = sex_gender_records(p);

    const auto folk = folk_subversive_lpr(records, lex());
    CHECK(folk.value == folk.recompute());

    const auto balanced = folk_subversive_lpr_balanced(records, lex());
    CHECK(balanced.value == balanced.recompute());

    const auto sg = sex_gender_lpr(records, *lex().find_gender_identifier("a woman"),
                                   female, male);
    CHECK(sg.value == sg.recompute());
  }
}

TEST_CASE("metric kinds print stable names") {
  CHECK(to_string(MetricKind::folk_subversive) == "folk_subversive");
  CHECK(to_string(MetricKind::sex_gender) == "sex_gender");
  CHECK(to_string(MetricKind::gender_illness) == "gender_illness");
  CHECK(to_string(MetricKind::baseline_median) == "baseline_median");
}

}  // TEST_SUITE
