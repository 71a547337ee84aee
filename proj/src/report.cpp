#include "gaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gaudit/errors.hpp"
#include "gaudit/figures.hpp"
#include "gaudit/metrics.hpp"
#include "gaudit/util.hpp"

namespace gaudit::report {

namespace {

std::string fmt_tick(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string fmt_val(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

IllnessRanking rank_illnesses(const std::string& model_id, const std::string& gender,
                              const std::vector<std::pair<std::string, double>>& lprs,
                              std::size_t k) {
  if (lprs.empty()) throw DomainError("rank_illnesses: empty input");

  // Stable sort on value keeps the input (lexicon) order among ties.
  std::vector<std::size_t> order(lprs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lprs[a].second > lprs[b].second;
  });

  IllnessRanking r;
  r.model_id = model_id;
  r.gender = gender;
  const std::size_t take = std::min(k, lprs.size());
  for (std::size_t i = 0; i < take; ++i) r.top.push_back(lprs[order[i]]);
  // Bottom k are the tail of the same descending order, reported ascending,
  // so top and bottom cannot overlap once 2k entries exist.
  for (std::size_t i = 0; i < take; ++i)
    r.bottom.push_back(lprs[order[lprs.size() - 1 - i]]);
  return r;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

MentalPhysicalComparison mental_physical_comparison(
    const std::map<std::string, double>& illness_lprs, const lexicon::Lexicon& lex) {
  MentalPhysicalComparison out;
  for (const auto& illness : lex.illnesses) {
    auto it = illness_lprs.find(illness.term);
    if (it == illness_lprs.end())
      throw MissingScoreError("mental_physical_comparison: no LPR for illness '" +
                              illness.term + "'");
    (illness.illness_class == lexicon::IllnessClass::mental ? out.mental : out.physical)
        .push_back(it->second);
  }
  out.test = stats::mann_whitney_u(out.mental, out.physical);
  out.stars = significance_stars(out.test.p_value);
  return out;
}

SizeTrend size_trend(std::vector<SizeTrendPoint> points) {
  if (points.size() < 3)
    throw DegenerateError("size_trend: needs at least 3 models, got " +
                          std::to_string(points.size()));
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    if (a.parameter_count != b.parameter_count)
      return a.parameter_count < b.parameter_count;
    return a.model_id < b.model_id;
  });
  std::vector<double> sizes, values;
  for (const auto& p : points) {
    sizes.push_back(static_cast<double>(p.parameter_count));
    values.push_back(p.folk_lpr);
  }
  SizeTrend out;
  out.test = stats::spearman_rho(sizes, values);
  out.points = std::move(points);
  return out;
}

// ---------------------------------------------------------------------------
// tables

namespace {

std::map<std::string, double> baseline_medians_by_context(
    const lexicon::Lexicon& lex, const std::vector<scoring::ScoreRecord>& records) {
  std::map<std::string, double> out;
  for (const auto& s : lex.sex_characteristics)
    out[s.term] = metrics::baseline_median(records, s.term).value;
  return out;
}

}  // namespace

Tables build_tables(const lexicon::Lexicon& lex, const std::vector<ModelRunData>& runs) {
  Tables t;
  std::vector<SizeTrendPoint> points;

  for (const auto& run : runs) {
    const std::string& model = run.model.model_id;

    std::map<std::string, double> medians;
    if (!run.sex_baseline.empty()) {
      medians = baseline_medians_by_context(lex, run.sex_baseline);
      for (const auto& s : lex.sex_characteristics)
        t.baselines.push_back({model, s.term, medians.at(s.term)});
    }

    if (!run.sex_gender.empty()) {
      const auto folk = metrics::folk_subversive_lpr(run.sex_gender, lex);
      const auto balanced = metrics::folk_subversive_lpr_balanced(run.sex_gender, lex);
      t.folk.push_back({model, run.model.parameter_count, folk.value, balanced.value});
      points.push_back({model, run.model.parameter_count, folk.value});

      const metrics::ScoreLookup lookup(run.sex_gender);
      for (const auto& s : lex.sex_characteristics)
        for (const auto& g : lex.gender_identifiers) {
          const auto& rec = lookup.require(s.term, g.term);
          Tables::GenderProbRow row;
          row.model_id = model;
          row.context = s.term;
          row.gender = g.term;
          row.log_prob = rec.log_prob;
          auto it = medians.find(s.term);
          if (it != medians.end()) {
            row.has_baseline = true;
            row.baseline_median = it->second;
            row.below_baseline = rec.log_prob < it->second;
          }
          t.gender_probabilities.push_back(row);
        }

      for (const auto& [female, male] : lexicon::matched_pairs(lex))
        for (const auto& g : lex.gender_identifiers) {
          const auto lpr = metrics::sex_gender_lpr(run.sex_gender, g, *female, *male);
          t.sex_gender.push_back({model, g.term, female->term, male->term, lpr.value});
        }
    }

    if (!run.gender_illness.empty()) {
      for (const auto& g : lex.gender_identifiers) {
        if (g.term == lex.male_identifier().term) continue;
        std::map<std::string, double> lprs;
        std::vector<std::pair<std::string, double>> ordered;
        for (const auto& illness : lex.illnesses) {
          const auto lpr = metrics::gender_illness_lpr(run.gender_illness, g, illness, lex);
          lprs[illness.term] = lpr.value;
          ordered.emplace_back(illness.term, lpr.value);
          t.gender_illness.push_back({model, g.term, illness.term,
                                      std::string(lexicon::to_string(illness.illness_class)),
                                      lpr.value});
        }
        const auto mp = mental_physical_comparison(lprs, lex);
        t.mental_physical.push_back({model, g.term, mp.mental.size(), mp.physical.size(),
                                     mp.test.statistic, mp.test.p_value,
                                     std::string(stats::to_string(mp.test.method)),
                                     mp.stars});
        const auto ranking = rank_illnesses(model, g.term, ordered);
        for (std::size_t i = 0; i < ranking.top.size(); ++i)
          t.rankings.push_back({model, g.term, "top", static_cast<int>(i + 1),
                                ranking.top[i].first, ranking.top[i].second});
        for (std::size_t i = 0; i < ranking.bottom.size(); ++i)
          t.rankings.push_back({model, g.term, "bottom", static_cast<int>(i + 1),
                                ranking.bottom[i].first, ranking.bottom[i].second});
      }
    }
  }

  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    if (a.parameter_count != b.parameter_count)
      return a.parameter_count < b.parameter_count;
    return a.model_id < b.model_id;
  });
  bool has_stats = points.size() >= 3;
  stats::TestResult trend;
  if (has_stats) {
    try {
      trend = size_trend(points).test;
    } catch (const DegenerateError&) {
      has_stats = false;  // e.g. every model the same size
    }
  }
  for (const auto& p : points)
    t.size_trend.push_back({p.model_id, p.parameter_count, p.folk_lpr, has_stats,
                            has_stats ? trend.statistic : 0.0,
                            has_stats ? trend.p_value : 1.0});
  return t;
}

// ---------------------------------------------------------------------------
// csv io

namespace {

constexpr const char* kGenderProbHeader =
    "model_id,context,gender,log_prob,baseline_median,below_baseline";
constexpr const char* kFolkHeader = "model_id,parameter_count,value,balanced";
constexpr const char* kSexGenderHeader = "model_id,gender,female_term,male_term,value";
constexpr const char* kGenderIllnessHeader = "model_id,gender,illness,class,value";
constexpr const char* kMentalPhysicalHeader =
    "model_id,gender,n_mental,n_physical,u_statistic,p_value,method,stars";
constexpr const char* kRankingHeader = "model_id,gender,side,rank,illness,value";
constexpr const char* kBaselineHeader = "model_id,context,median";
constexpr const char* kSizeTrendHeader = "model_id,parameter_count,folk_lpr,rho,p_value";

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows,
               std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StorageError("report: cannot write " + path.string());
  out << header << "\n";
  for (const auto& row : rows) out << util::csv_row(row);
  written.push_back(path);
}

std::vector<std::string> parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("report: cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != expected_header)
    throw SchemaError("report: unexpected header in " + path.string());
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_csv_row(line));
  }
  return rows;
}

}  // namespace

std::vector<std::filesystem::path> write_tables(const Tables& t,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  if (!t.gender_probabilities.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.gender_probabilities)
      rows.push_back({r.model_id, r.context, r.gender, util::format_g12(r.log_prob),
                      r.has_baseline ? util::format_g12(r.baseline_median) : "",
                      r.has_baseline ? (r.below_baseline ? "true" : "false") : ""});
    write_csv(dir / "gender_probabilities.csv", kGenderProbHeader, rows, written);
  }
  if (!t.folk.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.folk)
      rows.push_back({r.model_id, std::to_string(r.parameter_count),
                      util::format_g12(r.value), util::format_g12(r.balanced)});
    write_csv(dir / "folk_lpr.csv", kFolkHeader, rows, written);
  }
  if (!t.sex_gender.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.sex_gender)
      rows.push_back(
          {r.model_id, r.gender, r.female_term, r.male_term, util::format_g12(r.value)});
    write_csv(dir / "sex_gender_lpr.csv", kSexGenderHeader, rows, written);
  }
  if (!t.gender_illness.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.gender_illness)
      rows.push_back(
          {r.model_id, r.gender, r.illness, r.illness_class, util::format_g12(r.value)});
    write_csv(dir / "gender_illness_lpr.csv", kGenderIllnessHeader, rows, written);
  }
  if (!t.mental_physical.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.mental_physical)
      rows.push_back({r.model_id, r.gender, std::to_string(r.n_mental),
                      std::to_string(r.n_physical), util::format_g12(r.u_statistic),
                      util::format_g12(r.p_value), r.method, r.stars});
    write_csv(dir / "mental_physical.csv", kMentalPhysicalHeader, rows, written);
  }
  if (!t.rankings.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.rankings)
      rows.push_back({r.model_id, r.gender, r.side, std::to_string(r.rank), r.illness,
                      util::format_g12(r.value)});
    write_csv(dir / "illness_rankings.csv", kRankingHeader, rows, written);
  }
  if (!t.baselines.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.baselines)
      rows.push_back({r.model_id, r.context, util::format_g12(r.median)});
    write_csv(dir / "baseline_medians.csv", kBaselineHeader, rows, written);
  }
  if (!t.size_trend.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t.size_trend)
      rows.push_back({r.model_id, std::to_string(r.parameter_count),
                      util::format_g12(r.folk_lpr),
                      r.has_stats ? util::format_g12(r.rho) : "",
                      r.has_stats ? util::format_g12(r.p_value) : ""});
    write_csv(dir / "size_trend.csv", kSizeTrendHeader, rows, written);
  }
  return written;
}

Tables read_tables(const std::filesystem::path& dir) {
  Tables t;
  namespace fs = std::filesystem;

  if (fs::exists(dir / "gender_probabilities.csv"))
    for (const auto& f : read_csv(dir / "gender_probabilities.csv", kGenderProbHeader)) {
      Tables::GenderProbRow r;
      r.model_id = f.at(0);
      r.context = f.at(1);
      r.gender = f.at(2);
      r.log_prob = std::stod(f.at(3));
      r.has_baseline = !f.at(4).empty();
      if (r.has_baseline) {
        r.baseline_median = std::stod(f.at(4));
        r.below_baseline = f.at(5) == "true";
      }
      t.gender_probabilities.push_back(r);
    }
  if (fs::exists(dir / "folk_lpr.csv"))
    for (const auto& f : read_csv(dir / "folk_lpr.csv", kFolkHeader))
      t.folk.push_back({f.at(0), std::stoll(f.at(1)), std::stod(f.at(2)),
                        std::stod(f.at(3))});
  if (fs::exists(dir / "sex_gender_lpr.csv"))
    for (const auto& f : read_csv(dir / "sex_gender_lpr.csv", kSexGenderHeader))
      t.sex_gender.push_back({f.at(0), f.at(1), f.at(2), f.at(3), std::stod(f.at(4))});
  if (fs::exists(dir / "gender_illness_lpr.csv"))
    for (const auto& f : read_csv(dir / "gender_illness_lpr.csv", kGenderIllnessHeader))
      t.gender_illness.push_back({f.at(0), f.at(1), f.at(2), f.at(3), std::stod(f.at(4))});
  if (fs::exists(dir / "mental_physical.csv"))
    for (const auto& f : read_csv(dir / "mental_physical.csv", kMentalPhysicalHeader))
      t.mental_physical.push_back({f.at(0), f.at(1),
                                   static_cast<std::size_t>(std::stoull(f.at(2))),
                                   static_cast<std::size_t>(std::stoull(f.at(3))),
                                   std::stod(f.at(4)), std::stod(f.at(5)), f.at(6),
                                   f.at(7)});
  if (fs::exists(dir / "illness_rankings.csv"))
    for (const auto& f : read_csv(dir / "illness_rankings.csv", kRankingHeader))
      t.rankings.push_back(
          {f.at(0), f.at(1), f.at(2), std::stoi(f.at(3)), f.at(4), std::stod(f.at(5))});
  if (fs::exists(dir / "baseline_medians.csv"))
    for (const auto& f : read_csv(dir / "baseline_medians.csv", kBaselineHeader))
      t.baselines.push_back({f.at(0), f.at(1), std::stod(f.at(2))});
  if (fs::exists(dir / "size_trend.csv"))
    for (const auto& f : read_csv(dir / "size_trend.csv", kSizeTrendHeader)) {
      Tables::SizeTrendRow r;
      r.model_id = f.at(0);
      r.parameter_count = std::stoll(f.at(1));
      r.folk_lpr = std::stod(f.at(2));
      r.has_stats = !f.at(3).empty();
      if (r.has_stats) {
        r.rho = std::stod(f.at(3));
        r.p_value = std::stod(f.at(4));
      }
      t.size_trend.push_back(r);
    }
  return t;
}

// ---------------------------------------------------------------------------
// figures

namespace {

// Value-to-pixel affine map over a padded range.
struct Scale {
  double lo = 0.0, hi = 1.0, px0 = 0.0, px1 = 1.0;
  double operator()(double v) const {
    return px0 + (v - lo) / (hi - lo) * (px1 - px0);
  }
};

Scale make_scale(double lo, double hi, double px0, double px1, double pad_frac = 0.06) {
  if (lo > hi) std::swap(lo, hi);
  double pad = (hi - lo) * pad_frac;
  if (pad == 0.0) pad = (lo == 0.0) ? 1.0 : std::fabs(lo) * 0.1;
  return Scale{lo - pad, hi + pad, px0, px1};
}

std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  const double range = hi - lo;
  if (range <= 0.0) return {lo};
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    step = mult * mag;
    if (range / step <= target) break;
  }
  std::vector<double> ticks;
  double v = std::ceil(lo / step) * step;
  for (; v <= hi + step * 1e-9; v += step) {
    if (std::fabs(v) < step * 1e-9) v = 0.0;  // avoid "-0"
    ticks.push_back(v);
  }
  return ticks;
}

const fig::Color kBlack{20, 20, 20};
const fig::Color kGray{150, 150, 150};
const fig::Color kLightGray{220, 220, 220};

void draw_y_axis(fig::Figure& f, const Scale& sy, double x_left, double x_right) {
  for (double tick : nice_ticks(sy.lo, sy.hi)) {
    const double y = sy(tick);
    f.line(x_left, y, x_right, y, kLightGray, 1.0);
    f.text(x_left - 6, y + 3, fmt_tick(tick), 9, kBlack, 'r');
  }
}

// Rows grouped by model id, first-appearance order.
template <typename Row>
std::vector<std::pair<std::string, std::vector<const Row*>>> group_by_model(
    const std::vector<Row>& rows) {
  std::vector<std::pair<std::string, std::vector<const Row*>>> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == r.model_id; });
    if (it == groups.end()) {
      groups.push_back({r.model_id, {}});
      it = std::prev(groups.end());
    }
    it->second.push_back(&r);
  }
  return groups;
}

std::vector<std::string> ordered_unique(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  for (const auto& v : values)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

void fig_gender_probabilities(const std::vector<const Tables::GenderProbRow*>& rows,
                              const std::string& model,
                              const std::filesystem::path& stem,
                              std::vector<std::filesystem::path>& written) {
  std::vector<std::string> ctx_names, gender_names;
  for (const auto* r : rows) ctx_names.push_back(r->context);
  for (const auto* r : rows) gender_names.push_back(r->gender);
  const auto contexts = ordered_unique(ctx_names);
  const auto genders = ordered_unique(gender_names);

  double lo = 0.0, hi = -1e300;
  bool first = true;
  for (const auto* r : rows) {
    const double vals[] = {r->log_prob, r->has_baseline ? r->baseline_median : r->log_prob};
    for (double v : vals) {
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  fig::Figure f(1150, 420);
  const double left = 70, right = 1130, top = 50, bottom = 350;
  const Scale sy = make_scale(lo, hi, bottom, top);
  draw_y_axis(f, sy, left, right);
  f.frame(left, top, right - left, bottom - top, kBlack);
  f.text(12, 20, "log probability of gender completions by sexed context: " + model, 10,
         kBlack);

  // legend
  double lx = left;
  for (std::size_t gi = 0; gi < genders.size(); ++gi) {
    f.rect(lx, 28, 8, 8, fig::series_color(gi));
    f.text(lx + 11, 36, genders[gi], 9, kBlack);
    lx += 11 + 6.0 * (genders[gi].size() + 3);
  }

  const double group_w = (right - left) / static_cast<double>(contexts.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(genders.size());
  for (std::size_t ci = 0; ci < contexts.size(); ++ci) {
    const double gx = left + group_w * static_cast<double>(ci);
    f.text(gx + group_w / 2, bottom + 16, contexts[ci], 9, kBlack, 'm');
    for (std::size_t gi = 0; gi < genders.size(); ++gi) {
      const Tables::GenderProbRow* row = nullptr;
      for (const auto* r : rows)
        if (r->context == contexts[ci] && r->gender == genders[gi]) row = r;
      if (!row) continue;
      const double x = gx + group_w * 0.1 + bar_w * static_cast<double>(gi);
      const double y = sy(row->log_prob);
      f.rect(x, y, bar_w - 1.0, bottom - y, fig::series_color(gi));
    }
    // baseline median for this context, the meaningfulness floor
    for (const auto* r : rows)
      if (r->context == contexts[ci] && r->has_baseline) {
        const double y = sy(r->baseline_median);
        f.line(gx + 2, y, gx + group_w - 2, y, kBlack, 2.0);
        break;
      }
  }
  f.text(left, bottom + 36, "black line: median log probability of 47 baseline nouns", 9,
         kGray);
  const auto paths = f.write(stem);
  written.insert(written.end(), paths.begin(), paths.end());
}

void fig_sex_gender(const std::vector<const Tables::SexGenderRow*>& rows,
                    const std::string& model, const std::filesystem::path& stem,
                    std::vector<std::filesystem::path>& written) {
  std::vector<std::string> pair_names, gender_names;
  for (const auto* r : rows) pair_names.push_back(r->female_term + "/" + r->male_term);
  for (const auto* r : rows) gender_names.push_back(r->gender);
  const auto pairs = ordered_unique(pair_names);
  const auto genders = ordered_unique(gender_names);

  double lo = 0.0, hi = 0.0;
  for (const auto* r : rows) {
    lo = std::min(lo, r->value);
    hi = std::max(hi, r->value);
  }

  fig::Figure f(950, 400);
  const double left = 70, right = 930, top = 50, bottom = 330;
  const Scale sy = make_scale(lo, hi, bottom, top);
  draw_y_axis(f, sy, left, right);
  f.frame(left, top, right - left, bottom - top, kBlack);
  f.line(left, sy(0.0), right, sy(0.0), kBlack, 1.0);
  f.text(12, 20, "sex-gender log probability ratios (female minus male context): " + model,
         10, kBlack);

  double lx = left;
  for (std::size_t gi = 0; gi < genders.size(); ++gi) {
    f.rect(lx, 28, 8, 8, fig::series_color(gi));
    f.text(lx + 11, 36, genders[gi], 9, kBlack);
    lx += 11 + 6.0 * (genders[gi].size() + 3);
  }

  const double group_w = (right - left) / static_cast<double>(pairs.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(genders.size());
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const double gx = left + group_w * static_cast<double>(pi);
    f.text(gx + group_w / 2, bottom + 16, pairs[pi], 9, kBlack, 'm');
    for (std::size_t gi = 0; gi < genders.size(); ++gi) {
      const Tables::SexGenderRow* row = nullptr;
      for (const auto* r : rows)
        if (r->female_term + "/" + r->male_term == pairs[pi] && r->gender == genders[gi])
          row = r;
      if (!row) continue;
      const double x = gx + group_w * 0.1 + bar_w * static_cast<double>(gi);
      const double y0 = sy(0.0), y1 = sy(row->value);
      f.rect(x, std::min(y0, y1), bar_w - 1.0, std::fabs(y1 - y0),
             fig::series_color(gi));
    }
  }
  const auto paths = fig::Figure(f).write(stem);
  written.insert(written.end(), paths.begin(), paths.end());
}

void fig_mental_physical(const std::vector<const Tables::MentalPhysicalRow*>& mp_rows,
                         const std::vector<const Tables::GenderIllnessRow*>& gi_rows,
                         const std::string& model, const std::filesystem::path& stem,
                         std::vector<std::filesystem::path>& written) {
  const int panel_h = 150, panel_w = 860;
  fig::Figure f(panel_w + 40, panel_h * static_cast<int>(mp_rows.size()) + 40);
  f.text(12, 20, "illness log probability ratio distributions by class: " + model, 10,
         kBlack);

  for (std::size_t pi = 0; pi < mp_rows.size(); ++pi) {
    const auto& mp = *mp_rows[pi];
    const double top = 34 + panel_h * static_cast<double>(pi);
    const double left = 60, right = left + panel_w - 80;
    const double bottom = top + panel_h - 34;

    std::vector<double> mental, physical;
    for (const auto* r : gi_rows)
      if (r->gender == mp.gender)
        (r->illness_class == "mental" ? mental : physical).push_back(r->value);

    f.frame(left, top, right - left, bottom - top, kGray);
    f.text(left + 4, top + 12, mp.gender, 9, kBlack);
    const std::string annot = "U=" + fmt_val(mp.u_statistic) + " p=" +
                              fmt_val(mp.p_value) +
                              (mp.stars.empty() ? "" : " " + mp.stars);
    f.text(right - 4, top + 12, annot, 9, kBlack, 'r');

    try {
      const auto km = stats::kde_scott(mental, 201);
      const auto kp = stats::kde_scott(physical, 201);
      const double xlo = std::min(km.grid.front(), kp.grid.front());
      const double xhi = std::max(km.grid.back(), kp.grid.back());
      double dmax = 0.0;
      for (double d : km.density) dmax = std::max(dmax, d);
      for (double d : kp.density) dmax = std::max(dmax, d);
      const Scale sx{xlo, xhi, left, right};
      const Scale sy = make_scale(0.0, dmax, bottom, top + 18, 0.05);

      auto draw_curve = [&](const stats::DensityCurve& c, fig::Color color) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < c.grid.size(); ++i)
          pts.emplace_back(sx(c.grid[i]), sy(c.density[i]));
        f.polyline(pts, color, 1.5);
      };
      draw_curve(km, fig::series_color(0));
      draw_curve(kp, fig::series_color(1));
      for (double tick : nice_ticks(xlo, xhi, 6))
        f.text(sx(tick), bottom + 12, fmt_tick(tick), 8, kGray, 'm');
    } catch (const InsufficientDataError&) {
      f.text((left + right) / 2, (top + bottom) / 2, "insufficient spread for density",
             9, kGray, 'm');
    }
  }
  f.text(60, f.height() - 8,
         "mental (blue) vs physical (orange), stars: *** p<0.001, ** p<0.01, * p<0.05",
         9, kGray);
  const auto paths = f.write(stem);
  written.insert(written.end(), paths.begin(), paths.end());
}

void fig_illness_rankings(const std::vector<const Tables::RankingRow*>& rows,
                          const std::string& model, const std::filesystem::path& stem,
                          std::vector<std::filesystem::path>& written) {
  std::vector<std::string> gender_names;
  for (const auto* r : rows) gender_names.push_back(r->gender);
  const auto genders = ordered_unique(gender_names);

  const int panel_h = 130, panel_w = 860;
  fig::Figure f(panel_w + 40, panel_h * static_cast<int>(genders.size()) + 40);
  f.text(12, 20, "illnesses most and least associated with each gender: " + model, 10,
         kBlack);

  double lo = 0.0, hi = 0.0;
  for (const auto* r : rows) {
    lo = std::min(lo, r->value);
    hi = std::max(hi, r->value);
  }

  for (std::size_t gi = 0; gi < genders.size(); ++gi) {
    const double top = 34 + panel_h * static_cast<double>(gi);
    const double left = 60, right = left + panel_w - 80;
    const double bottom = top + panel_h - 14;
    const Scale sx = make_scale(lo, hi, left, right);
    f.frame(left, top, right - left, bottom - top, kGray);
    f.text(left + 4, top + 12, genders[gi], 9, kBlack);
    f.line(sx(0.0), top, sx(0.0), bottom, kGray, 1.0);

    std::vector<const Tables::RankingRow*> panel;
    for (const auto* r : rows)
      if (r->gender == genders[gi]) panel.push_back(r);
    std::stable_sort(panel.begin(), panel.end(), [](const auto* a, const auto* b) {
      if (a->side != b->side) return a->side == "top";
      return a->rank < b->rank;
    });

    const double row_h = (bottom - top - 18) / static_cast<double>(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
      const auto* r = panel[i];
      const double y = top + 16 + row_h * static_cast<double>(i);
      const double x0 = sx(0.0), x1 = sx(r->value);
      const fig::Color c = r->side == "top" ? fig::series_color(2) : fig::series_color(3);
      f.rect(std::min(x0, x1), y, std::max(std::fabs(x1 - x0), 1.0), row_h - 3, c);
      f.text(left + 4, y + row_h - 4, r->illness + " (" + fmt_val(r->value) + ")", 8,
             kBlack);
    }
  }
  const auto paths = f.write(stem);
  written.insert(written.end(), paths.begin(), paths.end());
}

void fig_folk(const std::vector<Tables::FolkRow>& rows,
              const std::filesystem::path& stem,
              std::vector<std::filesystem::path>& written) {
  double lo = 0.0, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min({lo, r.value, r.balanced});
    hi = std::max({hi, r.value, r.balanced});
  }

  fig::Figure f(700, 380);
  const double left = 70, right = 680, top = 50, bottom = 320;
  const Scale sy = make_scale(lo, hi, bottom, top);
  draw_y_axis(f, sy, left, right);
  f.frame(left, top, right - left, bottom - top, kBlack);
  f.line(left, sy(0.0), right, sy(0.0), kBlack, 1.0);
  f.text(12, 20, "folk-subversive log probability ratio by model", 10, kBlack);
  f.rect(left, 28, 8, 8, fig::series_color(0));
  f.text(left + 11, 36, "folk", 9, kBlack);
  f.rect(left + 60, 28, 8, 8, fig::series_color(1));
  f.text(left + 71, 36, "balanced", 9, kBlack);

  const double group_w = (right - left) / static_cast<double>(rows.size());
  const double bar_w = group_w * 0.8 / 2.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double gx = left + group_w * static_cast<double>(i);
    f.text(gx + group_w / 2, bottom + 16, r.model_id, 9, kBlack, 'm');
    const double pair[2] = {r.value, r.balanced};
    for (int b = 0; b < 2; ++b) {
      const double x = gx + group_w * 0.1 + bar_w * b;
      const double y0 = sy(0.0), y1 = sy(pair[b]);
      f.rect(x, std::min(y0, y1), bar_w - 1.0, std::max(std::fabs(y1 - y0), 1.0),
             fig::series_color(static_cast<std::size_t>(b)));
    }
  }
  const auto paths = f.write(stem);
  written.insert(written.end(), paths.begin(), paths.end());
}

void fig_size_trend(const std::vector<Tables::SizeTrendRow>& rows,
                    const std::filesystem::path& stem,
                    std::vector<std::filesystem::path>& written) {
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& r : rows) {
    const double lx = std::log10(static_cast<double>(r.parameter_count));
    xlo = std::min(xlo, lx);
    xhi = std::max(xhi, lx);
    ylo = std::min(ylo, r.folk_lpr);
    yhi = std::max(yhi, r.folk_lpr);
  }

  fig::Figure f(720, 460);
  const double left = 80, right = 690, top = 50, bottom = 380;
  const Scale sx = make_scale(xlo, xhi, left, right, 0.1);
  const Scale sy = make_scale(ylo, yhi, bottom, top, 0.1);
  draw_y_axis(f, sy, left, right);
  f.frame(left, top, right - left, bottom - top, kBlack);
  f.text(12, 20, "folk-subversive log probability ratio vs model size", 10, kBlack);
  for (double tick : nice_ticks(sx.lo, sx.hi, 6)) {
    f.line(sx(tick), bottom, sx(tick), top, kLightGray, 1.0);
    f.text(sx(tick), bottom + 14, "1e" + fmt_tick(tick), 8, kBlack, 'm');
  }
  f.text((left + right) / 2, bottom + 32, "parameters (log scale)", 9, kBlack, 'm');

  for (const auto& r : rows) {
    const double x = sx(std::log10(static_cast<double>(r.parameter_count)));
    const double y = sy(r.folk_lpr);
    f.circle(x, y, 4.0, fig::series_color(0));
    f.text(x, y - 8, r.model_id, 8, kBlack, 'm');
  }
  if (!rows.empty() && rows.front().has_stats)
    f.text(right - 4, top + 14,
           "Spearman rho=" + fmt_val(rows.front().rho) + " p=" +
               fmt_val(rows.front().p_value),
           9, kBlack, 'r');
  const auto paths = f.write(stem);
  written.insert(written.end(), paths.begin(), paths.end());
}

}  // namespace

std::vector<std::filesystem::path> render_figures(const Tables& t,
                                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  for (const auto& [model, rows] : group_by_model(t.gender_probabilities))
    fig_gender_probabilities(rows, model,
                             dir / ("gender_probabilities_" +
                                    util::sanitize_path_component(model)),
                             written);
  for (const auto& [model, rows] : group_by_model(t.sex_gender))
    fig_sex_gender(rows, model,
                   dir / ("sex_gender_lpr_" + util::sanitize_path_component(model)),
                   written);
  for (const auto& [model, mp_rows] : group_by_model(t.mental_physical)) {
    std::vector<const Tables::GenderIllnessRow*> gi_rows;
    for (const auto& r : t.gender_illness)
      if (r.model_id == model) gi_rows.push_back(&r);
    fig_mental_physical(mp_rows, gi_rows, model,
                        dir / ("mental_physical_" + util::sanitize_path_component(model)),
                        written);
  }
  for (const auto& [model, rows] : group_by_model(t.rankings))
    fig_illness_rankings(rows, model,
                         dir / ("illness_rankings_" +
                                util::sanitize_path_component(model)),
                         written);
  if (!t.folk.empty()) fig_folk(t.folk, dir / "folk_lpr", written);
  // a scatter of one point is not a trend
  if (t.size_trend.size() >= 2)
    fig_size_trend(t.size_trend, dir / "size_trend", written);
  return written;
}

std::vector<std::filesystem::path> render_report(const lexicon::Lexicon& lex,
                                                 const std::vector<ModelRunData>& runs,
                                                 const std::filesystem::path& out_dir) {
  const Tables tables = build_tables(lex, runs);
  const bool empty = tables.gender_probabilities.empty() && tables.folk.empty() &&
                     tables.sex_gender.empty() && tables.gender_illness.empty() &&
                     tables.baselines.empty() && tables.size_trend.empty();
  if (empty) {
    std::string missing =
        "gender_probabilities, folk_lpr, sex_gender_lpr, gender_illness_lpr, "
        "mental_physical, illness_rankings, baseline_medians, size_trend";
    throw ReportError("report: no views renderable; missing: " + missing);
  }
  auto written = write_tables(tables, out_dir / "tables");
  const auto figures = render_figures(tables, out_dir / "figures");
  written.insert(written.end(), figures.begin(), figures.end());
  return written;
}

}  // namespace gaudit::report
