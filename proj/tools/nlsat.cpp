// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// nlsat: calibrate, generate, inspect and verify NLSat datasets.
//
// Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 solver
// budget exhausted, 4 empty dataset (stats), 5 any other failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "nlsat/dataset.hpp"
#include "nlsat/error.hpp"
#include "nlsat/kernels.hpp"

namespace {

using namespace nlsat;

enum Exit { kOk = 0, kMismatch = 1, kUsage = 2, kBudget = 3, kEmpty = 4, kFailure = 5 };

std::filesystem::path cache_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  // The only environment variable the tool reads.
  if (const char* dir = std::getenv("NLSAT_CACHE_DIR"); dir != nullptr && *dir != '\0') {
    return std::filesystem::path(dir) / "calibration.txt";
  }
  return std::filesystem::path(".nlsat-cache") / "calibration.txt";
}

std::string read_all(std::istream& in) { return {std::istreambuf_iterator<char>(in), {}}; }

struct CalibrateArgs {
  std::string sizes;
  double p_int = 1.0;
  double p_neg = 0.5;
  std::uint64_t trials = 500;
  double tolerance = 0.02;
  std::uint64_t seed = 1;
  double alpha_max = 10.0;
  int jobs = 0;
  bool force = false;
  std::string curve;
  std::string cache;
};

int run_calibrate(const CalibrateArgs& a) {
  auto [lo, hi] = parse_size_range(a.sizes);
  CalibrationOptions opts;
  opts.trials_per_point = a.trials;
  opts.tolerance = a.tolerance;
  opts.seed = a.seed;
  opts.alpha_max = a.alpha_max;
  opts.jobs = a.jobs > 0 ? a.jobs : kernels::default_jobs();
  auto path = cache_path(a.cache);
  CalibrationTable table = CalibrationTable::load(path);
  for (auto n = lo; n <= hi; ++n) {
    CalibrationKey key{n, a.p_int, a.p_neg};
    if (!a.curve.empty()) {
      // start:stop:step
      double start = 0, stop = 0, step = 0;
      char c1 = 0, c2 = 0;
      std::istringstream in(a.curve);
      if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0 || stop < start) {
        throw StructuralError("--curve expects start:stop:step");
      }
      std::vector<double> alphas;
      for (int i = 0; start + i * step <= stop + 1e-9; ++i) alphas.push_back(start + i * step);
      EstimateOptions eo;
      eo.trials = a.trials;
      eo.seed = a.seed;
      eo.jobs = opts.jobs;
      auto curve = phase_curve(n, a.p_int, a.p_neg, alphas, eo);
      std::cout << "n\tp_int\tp_neg\talpha\tp_sat\thalf_width\n";
      for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
        std::cout << n << '\t' << format_double(a.p_int) << '\t' << format_double(a.p_neg) << '\t'
                  << format_double(curve.alphas[i]) << '\t' << format_double(curve.p_sat[i]) << '\t'
                  << format_double(curve.half_widths[i]) << '\n';
      }
      continue;
    }
    if (a.force || table.band(key) == nullptr) table.set(key, calibrate_critical(n, a.p_int, a.p_neg, opts));
    const CriticalBand* band = table.band(key);
    std::cout << "n=" << n << " p_int=" << format_double(a.p_int) << " p_neg=" << format_double(a.p_neg)
              << " alpha_c=" << format_double(band->alpha_c) << " band=[" << band->lo.to_string() << ", "
              << band->hi.to_string() << "]\n";
  }
  if (a.curve.empty()) table.save(path);
  return kOk;
}

struct GenerateArgs {
  std::string config;
  std::string fragment;
  std::string sizes;
  std::uint64_t per_size = 0;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::optional<double> diversity;
  std::optional<double> p_int;
  std::optional<double> p_neg;
  std::optional<std::uint64_t> calibration_trials;
  std::string out;
  std::string cnf_dir;
  std::string cache;
  int jobs = 0;
  bool verbose = false;
};

int run_generate(const GenerateArgs& a, DatasetConfig cfg) {
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw Error("cannot read config " + a.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw StructuralError("config " + a.config + ": " + e.what());
    }
    cfg.merge_json(j);
  }
  // Flags win over the config file.
  if (!a.fragment.empty()) cfg.fragment = parse_fragment(a.fragment);
  if (!a.sizes.empty()) std::tie(cfg.size_lo, cfg.size_hi) = parse_size_range(a.sizes);
  if (a.per_size > 0) cfg.per_size = a.per_size;
  if (!a.strategy.empty()) cfg.strategy = parse_strategy(a.strategy);
  if (a.seed) cfg.seed = a.seed;
  if (a.diversity) cfg.strategy_config.diversity_fraction = *a.diversity;
  if (a.p_int) cfg.p_int = *a.p_int;
  if (a.p_neg) cfg.p_neg = *a.p_neg;
  if (a.calibration_trials) cfg.calibration_trials = *a.calibration_trials;
  cfg.jobs = a.jobs > 0 ? a.jobs : kernels::default_jobs();
  if (!cfg.seed) throw StructuralError("--seed is required (no clock-based default)");
  cfg.validate();

  auto path = cache_path(a.cache);
  CalibrationTable table = CalibrationTable::load(path);
  auto before = table.entries().size();
  for (const auto& key : required_calibrations(cfg)) {
    if (table.band(key) == nullptr) std::cerr << "calibrating n=" << key.n << " ...\n";
  }
  Dataset d = generate_dataset(cfg, table);
  if (table.entries().size() != before) table.save(path);
  std::optional<std::filesystem::path> cnf;
  if (!a.cnf_dir.empty()) cnf = a.cnf_dir;
  write_dataset(a.out, d, cnf);
  for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
  if (a.verbose) std::cerr << d.audit.dump(2) << '\n';
  std::cout << stats_report(d.records, std::filesystem::path(a.out).filename().string()).to_text();
  return kOk;
}

int run_stats(const std::string& file, bool tsv) {
  auto loaded = load_dataset(file);
  for (const auto& i : loaded.issues) std::cerr << file << ":" << i.line << ": " << i.message << '\n';
  auto rep = stats_report(loaded.dataset.records, std::filesystem::path(file).filename().string());
  if (rep.empty()) {
    std::cerr << file << ": no records\n";
    return kEmpty;
  }
  std::cout << (tsv ? rep.to_tsv() : rep.to_text());
  return loaded.issues.empty() ? kOk : kMismatch;
}

int run_verify(const std::string& file, const VerifyOptions& opts) {
  auto rep = verify_dataset(file, opts);
  for (const auto& i : rep.issues) {
    std::cout << file << ":" << i.line << ": " << (i.id.empty() ? "-" : i.id) << ": " << i.kind << ": " << i.detail
              << '\n';
  }
  std::cout << rep.records << " records, " << rep.issues.size() << " mismatches\n";
  return rep.ok() ? kOk : kMismatch;
}

struct ParseArgs {
  std::string fragment = "grl";
  std::string text;
  std::string conjecture;
  bool lenient = false;
};

int run_parse(const ParseArgs& a) {
  std::string text = a.text.empty() ? read_all(std::cin) : a.text;
  while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.pop_back();
  auto sentences = split_sentences(text);
  ParseOptions opts;
  opts.lenient = a.lenient;
  CnfFormula f;
  VarBinding b;
  switch (parse_fragment(a.fragment)) {
    case Fragment::Grl: {
      auto p = parse_grl(sentences, Lexicon::builtin_food(), opts);
      f = p.formula;
      b = p.binding;
      break;
    }
    case Fragment::Rcl: {
      auto p = parse_rcl(sentences, Lexicon::builtin_occupations(), Lexicon::builtin_names(), opts);
      f = ground_rcl(p.problem).first;
      b = p.binding;
      break;
    }
    default: {
      if (a.conjecture.empty()) throw StructuralError("ruletaker parsing needs --conjecture");
      auto p = parse_ruletaker(sentences, a.conjecture, Lexicon::builtin_attributes(), opts);
      f = p.theory.formula();
      b = p.binding;
      std::cout << "c conjecture " << p.conjecture.to_dimacs() << '\n';
    }
  }
  for (std::size_t i = 0; i < b.words.size(); ++i) std::cout << "c var " << i + 1 << ' ' << b.words[i] << '\n';
  for (std::size_t i = 0; i < b.constants.size(); ++i) std::cout << "c constant " << i << ' ' << b.constants[i] << '\n';
  std::cout << to_dimacs(f);
  return kOk;
}

int run_export(const std::string& file, const std::string& out) {
  auto loaded = load_dataset(file);
  for (const auto& i : loaded.issues) std::cerr << file << ":" << i.line << ": " << i.message << '\n';
  std::filesystem::create_directories(out);
  for (const auto& r : loaded.dataset.records) {
    std::ofstream f(std::filesystem::path(out) / (r.id + ".cnf"), std::ios::binary);
    if (!f) throw Error("cannot write into " + out);
    f << "c " << r.id << " label=" << r.label << '\n' << r.dimacs;
  }
  std::cout << loaded.dataset.records.size() << " formulas written to " << out << '\n';
  return loaded.issues.empty() ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate and check natural-language satisfiability datasets."};
  app.require_subcommand(1);

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Locate the P(sat)=0.5 band for random formulas");
  calibrate->add_option("--n", cal.sizes, "Variable count or range lo..hi")->required();
  calibrate->add_option("--p-int", cal.p_int, "Probability of a 3-clause")->check(CLI::Range(0.0, 1.0));
  calibrate->add_option("--p-neg", cal.p_neg, "Negation probability")->check(CLI::Range(0.0, 1.0));
  calibrate->add_option("--trials", cal.trials, "Formulas per estimate")->check(CLI::PositiveNumber);
  calibrate->add_option("--tolerance", cal.tolerance, "Bisection stops when |p - 0.5| <= tolerance");
  calibrate->add_option("--seed", cal.seed, "Master seed");
  calibrate->add_option("--alpha-max", cal.alpha_max, "Upper end of the search range");
  calibrate->add_option("--jobs", cal.jobs, "Workers (default: all cores)");
  calibrate->add_flag("--force", cal.force, "Recalibrate even if cached");
  calibrate->add_option("--curve", cal.curve, "Print P(sat) rows for start:stop:step instead of calibrating");
  calibrate->add_option("--cache", cal.cache, "Calibration file");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a dataset");
  generate->add_option("--config", gen.config, "JSON config; flags override it");
  generate->add_option("--fragment", gen.fragment, "grl, rcl or ruletaker");
  generate->add_option("--sizes", gen.sizes, "Size range lo..hi");
  generate->add_option("--per-size", gen.per_size, "Instances per size");
  generate->add_option("--strategy", gen.strategy, "hard, naive or biased");
  generate->add_option("--seed", gen.seed, "Master seed (required)");
  generate->add_option("--diversity", gen.diversity, "Share of widened-band draws in train");
  generate->add_option("--p-int", gen.p_int, "Probability of a 3-clause");
  generate->add_option("--p-neg", gen.p_neg, "Negation probability");
  generate->add_option("--calibration-trials", gen.calibration_trials, "Trials per point for missing calibrations");
  generate->add_option("--out", gen.out, "Output JSONL path")->required();
  generate->add_option("--cnf-dir", gen.cnf_dir, "Also write one DIMACS file per record here");
  generate->add_option("--cache", gen.cache, "Calibration file");
  generate->add_option("--jobs", gen.jobs, "Workers (default: all cores); output does not depend on it");
  generate->add_flag("-v,--verbose", gen.verbose, "Print per-size acceptance counts");

  GenerateArgs rt;
  std::string rt_alpha;
  auto* retro = app.add_subcommand("retrofit", "Generate single-entity rule theories from with-replacement 3-SAT");
  retro->add_option("--sizes", rt.sizes, "Variable counts lo..hi (default 5..7)");
  retro->add_option("--per-size", rt.per_size, "Instances per size");
  retro->add_option("--seed", rt.seed, "Master seed (required)");
  retro->add_option("--alpha", rt_alpha, "Alpha band lo..hi of the raw formulas (ratios allowed: 3..5)");
  retro->add_option("--out", rt.out, "Output JSONL path")->required();
  retro->add_option("--jobs", rt.jobs, "Workers");
  retro->add_flag("-v,--verbose", rt.verbose, "Print acceptance counts");

  std::string stats_file;
  bool stats_tsv = false;
  auto* stats = app.add_subcommand("stats", "Decision/conflict report for a dataset");
  stats->add_option("file", stats_file, "Dataset JSONL")->required();
  stats->add_flag("--tsv", stats_tsv, "Tab-separated rows");

  std::string verify_file;
  VerifyOptions vopts;
  auto* verify = app.add_subcommand("verify", "Re-parse and re-solve every record");
  verify->add_option("file", verify_file, "Dataset JSONL")->required();
  verify->add_flag("--lenient", vopts.lenient, "Accept surface variants");
  verify->add_option("--external-solver", vopts.external_solver, "Cross-check labels with this solver command");

  ParseArgs pa;
  auto* parse = app.add_subcommand("parse", "Parse English sentences to DIMACS (stdin unless --text)");
  parse->add_option("--fragment", pa.fragment, "grl, rcl or ruletaker");
  parse->add_option("--text", pa.text, "Sentences");
  parse->add_option("--conjecture", pa.conjecture, "Conjecture sentence (ruletaker)");
  parse->add_flag("--lenient", pa.lenient, "Accept surface variants");

  std::string export_file;
  std::string export_dir;
  auto* exp = app.add_subcommand("export-dimacs", "Write one DIMACS file per record");
  exp->add_option("file", export_file, "Dataset JSONL")->required();
  exp->add_option("--out", export_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*calibrate) return run_calibrate(cal);
    if (*generate) return run_generate(gen, DatasetConfig{});
    if (*retro) {
      DatasetConfig cfg;
      cfg.fragment = Fragment::RuleTaker;
      cfg.size_lo = 5;
      cfg.size_hi = 7;
      if (!rt_alpha.empty()) {
        auto dots = rt_alpha.find("..");
        if (dots == std::string::npos) throw StructuralError("--alpha expects lo..hi");
        cfg.retrofit_alpha_min = Rational::parse(rt_alpha.substr(0, dots));
        cfg.retrofit_alpha_max = Rational::parse(rt_alpha.substr(dots + 2));
      }
      rt.fragment = "ruletaker";
      return run_generate(rt, cfg);
    }
    if (*stats) return run_stats(stats_file, stats_tsv);
    if (*verify) return run_verify(verify_file, vopts);
    if (*parse) return run_parse(pa);
    if (*exp) return run_export(export_file, export_dir);
  } catch (const BudgetExhausted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << " (chars " << e.span_begin() << "-" << e.span_end() << ")\n";
    return kFailure;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
