// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Dataset generation, splitting, serialization (JSONL), hardness reports and
// integrity checks.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nlsat/fragments.hpp"
#include "nlsat/phase.hpp"
#include "nlsat/retrofit.hpp"
#include "nlsat/strategy.hpp"

namespace nlsat {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kDatasetSchemaVersion = 1;

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct LexiconPaths {
  std::string food;
  std::string occupations;
  std::string names;
  std::string attributes;
};

/// Word lists in use; empty paths select the built-in lists.
struct Lexicons {
  Lexicon food;
  Lexicon occupations;
  Lexicon names;
  Lexicon attributes;

  static Lexicons load(const LexiconPaths& paths);
};

struct DatasetConfig {
  Fragment fragment = Fragment::Grl;
  /// Variables (grl, ruletaker) or target ground variables (rcl).
  std::uint32_t size_lo = 5;
  std::uint32_t size_hi = 12;
  std::uint64_t per_size = 100;
  Strategy strategy = Strategy::Hard;
  StrategyConfig strategy_config;
  /// Balance labels among the diversity draws as well.
  bool balance_diversity = true;
  SplitRatios split;
  std::optional<std::uint64_t> seed;
  double p_int = 1.0;
  double p_neg = 0.5;
  /// Share of grounded clauses given as per-constant facts (rcl).
  double ground_fraction = 0.2;
  RenderOptions render;
  /// Alpha band of the with-replacement formulas (ruletaker).
  Rational retrofit_alpha_min = Rational::from_int(3);
  Rational retrofit_alpha_max = Rational::from_int(5);
  std::string entity = "lion";
  LexiconPaths lexicons;
  std::uint64_t calibration_trials = 500;
  double calibration_tolerance = 0.02;
  std::uint64_t calibration_seed = 1;
  /// Candidates evaluated per parallel batch. Fixed so output does not
  /// depend on the worker count.
  std::uint64_t batch = 256;
  /// Abort when fewer than stall_min_rate of the last stall_window candidates
  /// were accepted.
  std::uint64_t stall_window = 5000;
  double stall_min_rate = 0.01;
  std::uint64_t max_decisions = 10'000'000;
  /// Worker count; never affects output.
  int jobs = 1;

  /// Throws StructuralError naming the bad field.
  void validate() const;

  /// Keys as in to_json; unknown keys are rejected. Missing keys keep their
  /// current value.
  void merge_json(const nlohmann::json& j);
  /// Every key except `jobs`, which must not influence output.
  ordered_json to_json() const;
};

/// "5..12" or "7".
std::pair<std::uint32_t, std::uint32_t> parse_size_range(std::string_view text);

/// Calibration keys the config needs before generation (hard and biased).
std::vector<CalibrationKey> required_calibrations(const DatasetConfig& cfg);

struct InstanceRecord {
  std::string id;
  Fragment fragment = Fragment::Grl;
  std::string text;
  /// "sat"/"unsat", or "true"/"false" for rule theories.
  std::string label;
  std::uint32_t n_vars = 0;
  std::optional<std::uint32_t> n_ground_vars;
  std::uint64_t n_clauses = 0;
  std::string alpha;
  std::string strategy;
  std::uint64_t seed_index = 0;
  std::string split;
  SolveStats stats;
  std::string dimacs;

  /// Size bucket (variables, or target ground variables for rcl).
  std::uint32_t size = 0;
  bool diversity = false;
  VarBinding binding;
  std::string conjecture_text;
  std::optional<Literal> conjecture;

  bool positive() const { return label == "sat" || label == "true"; }

  ordered_json to_json() const;
  /// Throws StructuralError on missing or mistyped fields.
  static InstanceRecord from_json(const nlohmann::json& j);
};

struct Dataset {
  ordered_json header;
  std::vector<InstanceRecord> records;
  std::vector<std::string> warnings;
  /// Per-bucket candidate, acceptance and rejection counts.
  ordered_json audit;
};

/// Generates, splits and orders a dataset. Calibration entries missing from
/// `table` are computed and added first. Throws GenerationStalled when
/// rejection sampling stops making progress.
Dataset generate_dataset(const DatasetConfig& cfg, CalibrationTable& table);

/// Assigns `split` on every record. Stratified by (size, label) with
/// largest-remainder rounding per cell; diversity records go to train first.
/// Cells smaller than 10 are pooled per size with a warning.
std::vector<std::string> split_dataset(std::vector<InstanceRecord>& records, const SplitRatios& ratios,
                                       std::uint64_t seed);

/// Largest-remainder apportionment of `total` by `ratios`; ties go to the
/// earlier entry.
std::vector<std::uint64_t> largest_remainder(std::uint64_t total, const std::vector<double>& ratios);

struct StatsRow {
  std::string scope;
  std::uint64_t count = 0;
  double positive_fraction = 0.0;
  double mean_decisions = 0.0;
  double median_decisions = 0.0;
  double mean_conflicts = 0.0;
  double median_conflicts = 0.0;
};

struct StatsReport {
  std::vector<StatsRow> rows;

  bool empty() const { return rows.empty(); }
  /// Aligned table, one decimal.
  std::string to_text() const;
  /// Header line plus one tab-separated line per row.
  std::string to_tsv() const;
};

/// One "all" row followed by one row per size.
StatsReport stats_report(const std::vector<InstanceRecord>& records, const std::string& name = "all");

double median(std::vector<double> values);

/// Header line, then one record per line.
std::string dataset_to_jsonl(const Dataset& d);
/// Writes atomically, plus `<path>.stats.txt`, plus one `<id>.cnf` per record
/// under `cnf_dir` when given.
void write_dataset(const std::filesystem::path& path, const Dataset& d,
                   const std::optional<std::filesystem::path>& cnf_dir = std::nullopt);

struct LoadIssue {
  std::size_t line = 0;
  std::string message;
};

struct LoadedDataset {
  Dataset dataset;
  /// Line number of each record.
  std::vector<std::size_t> lines;
  std::vector<LoadIssue> issues;
};

/// Malformed lines are reported, not thrown; I/O failure throws Error.
LoadedDataset load_dataset(const std::filesystem::path& path);

struct VerifyOptions {
  /// Lists used when the header names none.
  LexiconPaths lexicons;
  bool lenient = false;
  /// Shell command for an external solver cross-check.
  std::string external_solver;
  SolverOptions solver;
};

struct VerifyIssue {
  std::size_t line = 0;
  std::string id;
  std::string kind;
  std::string detail;
};

struct VerifyReport {
  std::uint64_t records = 0;
  std::vector<VerifyIssue> issues;

  bool ok() const { return issues.empty(); }
};

/// Checks one record: text parses back to the stored CNF, the solver
/// reproduces label and stats. Returns the issues found.
std::vector<VerifyIssue> verify_record(const InstanceRecord& r, const Lexicons& lex, const VerifyOptions& opts);

VerifyReport verify_dataset(const std::filesystem::path& path, const VerifyOptions& opts = {});

}  // namespace nlsat
