#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gaudit/lexicon.hpp"
#include "gaudit/scoring.hpp"
#include "gaudit/stats.hpp"

namespace gaudit::report {

struct IllnessRanking {
  std::string model_id;
  std::string gender;
  std::vector<std::pair<std::string, double>> top;     // descending by value
  std::vector<std::pair<std::string, double>> bottom;  // ascending by value
};

// lprs must be in lexicon illness order; ties break by that order. With at
// least 2k entries top and bottom never overlap; smaller inputs are returned
// whole from both ends.
IllnessRanking rank_illnesses(const std::string& model_id, const std::string& gender,
                              const std::vector<std::pair<std::string, double>>& lprs,
                              std::size_t k = 3);

// "***" below 0.001, "**" below 0.01, "*" below 0.05, otherwise empty.
std::string significance_stars(double p);

struct MentalPhysicalComparison {
  std::vector<double> mental;    // lexicon order, 40 with the shipped lexicon
  std::vector<double> physical;  // lexicon order, 70 with the shipped lexicon
  stats::TestResult test;
  std::string stars;
};

// Splits one gender's illness LPRs by class and compares the two samples.
// Every illness in the lexicon must be present.
MentalPhysicalComparison mental_physical_comparison(
    const std::map<std::string, double>& illness_lprs, const lexicon::Lexicon& lex);

struct SizeTrendPoint {
  std::string model_id;
  std::int64_t parameter_count = 0;
  double folk_lpr = 0.0;
};

struct SizeTrend {
  stats::TestResult test;
  std::vector<SizeTrendPoint> points;  // sorted by parameter count
};

// Spearman rank correlation of model size against the Folk-Subversive LPR.
// Needs at least 3 models; errors propagate from the correlation.
SizeTrend size_trend(std::vector<SizeTrendPoint> points);

// Raw inputs for one scored run; empty vectors mean the suite was not run.
struct ModelRunData {
  scoring::ModelDescriptor model;
  std::vector<scoring::ScoreRecord> sex_gender;
  std::vector<scoring::ScoreRecord> sex_baseline;
  std::vector<scoring::ScoreRecord> gender_illness;
};

// Flat rows mirroring the CSV files one to one. Figures are pure functions
// of these tables: rendering from re-parsed CSVs reproduces identical bytes.
struct Tables {
  struct GenderProbRow {
    std::string model_id, context, gender;
    double log_prob = 0.0;
    bool has_baseline = false;
    double baseline_median = 0.0;
    bool below_baseline = false;
  };
  struct FolkRow {
    std::string model_id;
    std::int64_t parameter_count = 0;
    double value = 0.0;
    double balanced = 0.0;
  };
  struct SexGenderRow {
    std::string model_id, gender, female_term, male_term;
    double value = 0.0;
  };
  struct GenderIllnessRow {
    std::string model_id, gender, illness, illness_class;
    double value = 0.0;
  };
  struct MentalPhysicalRow {
    std::string model_id, gender;
    std::size_t n_mental = 0, n_physical = 0;
    double u_statistic = 0.0, p_value = 1.0;
    std::string method, stars;
  };
  struct RankingRow {
    std::string model_id, gender, side;  // side: "top" | "bottom"
    int rank = 0;                        // 1-based within its side
    std::string illness;
    double value = 0.0;
  };
  struct BaselineRow {
    std::string model_id, context;
    double median = 0.0;
  };
  struct SizeTrendRow {
    std::string model_id;
    std::int64_t parameter_count = 0;
    double folk_lpr = 0.0;
    bool has_stats = false;  // filled on every row once >= 3 models exist
    double rho = 0.0, p_value = 1.0;
  };

  std::vector<GenderProbRow> gender_probabilities;
  std::vector<FolkRow> folk;
  std::vector<SexGenderRow> sex_gender;
  std::vector<GenderIllnessRow> gender_illness;
  std::vector<MentalPhysicalRow> mental_physical;
  std::vector<RankingRow> rankings;
  std::vector<BaselineRow> baselines;
  std::vector<SizeTrendRow> size_trend;
};

Tables build_tables(const lexicon::Lexicon& lex, const std::vector<ModelRunData>& runs);

// Writes tables/<view>.csv for every non-empty view; returns written paths.
std::vector<std::filesystem::path> write_tables(const Tables& tables,
                                                const std::filesystem::path& dir);

// Parses what write_tables wrote; missing files load as empty views.
Tables read_tables(const std::filesystem::path& dir);

// Writes figures/<view>[_<model>].svg plus .png mirrors; returns paths.
std::vector<std::filesystem::path> render_figures(const Tables& tables,
                                                  const std::filesystem::path& dir);

// build_tables + write_tables + render_figures under out_dir. ReportError if
// nothing is renderable.
std::vector<std::filesystem::path> render_report(const lexicon::Lexicon& lex,
                                                 const std::vector<ModelRunData>& runs,
                                                 const std::filesystem::path& out_dir);

}  // namespace gaudit::report
