#pragma once

// Command-line front end: gen | train | eval | ablate | gradcheck.
//
// Configuration is a flat key=value file. Values resolve as
// defaults < --config file < --set key=value < dedicated flags. Every command
// writes config.txt (the resolved configuration) next to its artifacts.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ukgc/error.hpp"
#include "ukgc/experiment.hpp"
#include "ukgc/gradcheck.hpp"
#include "ukgc/interactions.hpp"
#include "ukgc/model.hpp"
#include "ukgc/synthgen.hpp"
#include "ukgc/trainer.hpp"
#include "ukgc/ukg.hpp"

namespace ukgc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct RunConfig {
  // Paths. Empty data-file paths resolve inside data_dir.
  std::string data_dir = ".";
  std::string out_dir = ".";
  std::string kg;
  std::string checkins;
  std::string truth;
  std::string checkpoint;

  CityConfig city;
  ModelShape shape;
  HyperParams hp;
  SplitRatios ratios;
  std::uint64_t seed = 0;
  std::string scorer = "TIE";
  std::string split = "test";
  bool no_disentangle = false;
  bool te_only = false;

  std::string kg_path() const { return kg.empty() ? (fs::path(data_dir) / "kg.tsv").string() : kg; }
  std::string checkins_path() const {
    return checkins.empty() ? (fs::path(data_dir) / "checkins.tsv").string() : checkins;
  }
  std::string truth_path() const { return truth; }
  std::string checkpoint_path() const {
    return checkpoint.empty() ? (fs::path(out_dir) / "checkpoint.txt").string() : checkpoint;
  }

  Variant variant() const {
    if (no_disentangle) return Variant::NoDisentangle;
    return te_only ? Variant::TeOnly : Variant::Full;
  }
};

namespace detail {

template <class T>
T parse_value(std::string_view key, const std::string& text) {
  T value{};
  std::istringstream in(text);
  if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!text.empty() && text.front() != '-' && (in >> value) && in.peek() == EOF) return value;
  } else {
    if ((in >> value) && in.peek() == EOF) return value;
  }
  throw Error(ErrorCode::InvalidConfig,
              "bad value '" + text + "' for key " + std::string(key));
}

template <class T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else {
    return std::to_string(v);
  }
}

struct Field {
  std::string key;
  bool is_path;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field field(std::string key, T RunConfig::*member, bool is_path = false) {
  return {key, is_path,
          [member, key](RunConfig& c, const std::string& v) { c.*member = parse_value<T>(key, v); },
          [member](const RunConfig& c) { return format_value(c.*member); }};
}

template <class S, class T>
Field nested(std::string key, S RunConfig::*outer, T S::*inner) {
  return {key, false,
          [outer, inner, key](RunConfig& c, const std::string& v) {
            (c.*outer).*inner = parse_value<T>(key, v);
          },
          [outer, inner](const RunConfig& c) { return format_value((c.*outer).*inner); }};
}

inline const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      field("data_dir", &RunConfig::data_dir, true),
      field("out_dir", &RunConfig::out_dir, true),
      field("kg", &RunConfig::kg, true),
      field("checkins", &RunConfig::checkins, true),
      field("truth", &RunConfig::truth, true),
      field("checkpoint", &RunConfig::checkpoint, true),
      field("seed", &RunConfig::seed),
      field("scorer", &RunConfig::scorer),
      field("split", &RunConfig::split),
      field("no_disentangle", &RunConfig::no_disentangle),
      field("te_only", &RunConfig::te_only),
      nested("n_users", &RunConfig::city, &CityConfig::n_users),
      nested("n_pois", &RunConfig::city, &CityConfig::n_pois),
      nested("n_regions", &RunConfig::city, &CityConfig::n_regions),
      nested("n_business_areas", &RunConfig::city, &CityConfig::n_business_areas),
      nested("n_brands", &RunConfig::city, &CityConfig::n_brands),
      nested("n_cate1", &RunConfig::city, &CityConfig::n_cate1),
      nested("n_cate2", &RunConfig::city, &CityConfig::n_cate2),
      nested("n_cate3", &RunConfig::city, &CityConfig::n_cate3),
      nested("latent_dim", &RunConfig::city, &CityConfig::latent_dim),
      nested("geo_strength", &RunConfig::city, &CityConfig::geo_strength),
      nested("functional_scale", &RunConfig::city, &CityConfig::functional_scale),
      nested("base_logit", &RunConfig::city, &CityConfig::base_logit),
      nested("interactions_per_user", &RunConfig::city, &CityConfig::interactions_per_user),
      nested("dim", &RunConfig::shape, &ModelShape::dim),
      nested("n_intents", &RunConfig::shape, &ModelShape::n_intents),
      nested("n_layers", &RunConfig::shape, &ModelShape::n_layers),
      nested("lambda_ind", &RunConfig::hp, &HyperParams::lambda_ind),
      nested("lambda_reg", &RunConfig::hp, &HyperParams::lambda_reg),
      nested("alpha", &RunConfig::hp, &HyperParams::alpha),
      nested("lr", &RunConfig::hp, &HyperParams::lr),
      nested("batch_size", &RunConfig::hp, &HyperParams::batch_size),
      nested("adam_beta1", &RunConfig::hp, &HyperParams::adam_beta1),
      nested("adam_beta2", &RunConfig::hp, &HyperParams::adam_beta2),
      nested("adam_eps", &RunConfig::hp, &HyperParams::adam_eps),
      nested("patience", &RunConfig::hp, &HyperParams::patience),
      nested("max_epochs", &RunConfig::hp, &HyperParams::max_epochs),
      nested("split_train", &RunConfig::ratios, &SplitRatios::train),
      nested("split_val", &RunConfig::ratios, &SplitRatios::val),
      nested("split_test", &RunConfig::ratios, &SplitRatios::test),
  };
  return table;
}

}  // namespace detail

inline void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : detail::fields()) {
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
}

inline void apply_assignment(RunConfig& cfg, std::string_view line, std::size_t line_no = 0) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::InvalidConfig,
                "expected key=value" + (line_no ? " on line " + std::to_string(line_no) : "") +
                    ": '" + std::string(line) + "'",
                line_no);
  }
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return std::string(s);
  };
  set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  ukgc::detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty() || line.front() == '#') return;
    apply_assignment(cfg, line, line_no);
  });
}

// Resolved configuration, one key=value per line in a fixed order.
inline std::string config_echo(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : detail::fields()) out += f.key + "=" + f.get(cfg) + "\n";
  return out;
}

// FNV-1a over the echo minus paths and the scorer, so reports from the same
// model and data agree regardless of where files live or how they are scored.
inline std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : detail::fields()) {
    if (f.is_path || f.key == "scorer" || f.key == "split") continue;
    for (char c : f.key + "=" + f.get(cfg) + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

inline fs::path prepare_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) {
    throw Error(ErrorCode::Io, "cannot create output directory " + cfg.out_dir);
  }
  return cfg.out_dir;
}

struct LoadedData {
  UrbanKG kg;
  DatasetSplit split;
};

// Reads the KG and check-ins and splits with the run seed. Check-ins may
// declare fewer POIs than the KG; they are widened to the KG catalog.
inline LoadedData load_data(const RunConfig& cfg) {
  LoadedData d;
  const std::string kg_text = read_file(cfg.kg_path());
  try {
    d.kg = parse_triplets(kg_text);
  } catch (const Error& e) {
    throw Error(e.code(), cfg.kg_path() + ": " + e.what(), e.line());
  }
  const std::string checkins_text = read_file(cfg.checkins_path());
  InteractionSet checkins;
  try {
    checkins = parse_checkins(checkins_text);
  } catch (const Error& e) {
    throw Error(e.code(), cfg.checkins_path() + ": " + e.what(), e.line());
  }
  if (checkins.n_pois() > d.kg.n_pois()) {
    throw Error(ErrorCode::CountMismatch,
                "check-ins reference " + std::to_string(checkins.n_pois()) + " POIs but the KG has " +
                    std::to_string(d.kg.n_pois()));
  }
  if (checkins.n_pois() < d.kg.n_pois()) {
    const auto pairs = checkins.pairs();
    checkins = InteractionSet(checkins.n_users(), d.kg.n_pois(), pairs);
  }
  d.split = split_dataset(checkins, cfg.ratios, cfg.seed);
  return d;
}

inline Scorer parse_scorer(const std::string& name) {
  auto s = scorer_from_string(name);
  if (!s) throw Error(ErrorCode::InvalidConfig, "unknown scorer '" + name + "' (TIE, TE, YUP)");
  return *s;
}

inline EvalTarget parse_target(const std::string& name) {
  if (name == "val" || name == "validation") return EvalTarget::Validation;
  if (name == "test") return EvalTarget::Test;
  throw Error(ErrorCode::InvalidConfig, "unknown split '" + name + "' (val, test)");
}

inline json metrics_json(const MetricsReport& r) {
  json j;
  j["scorer"] = r.scorer;
  j["split"] = r.target;
  j["seed"] = r.seed;
  j["n_users_evaluated"] = r.n_users_evaluated;
  j["defined"] = r.defined;
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    j["recall@" + std::to_string(r.ks[i])] = r.recall[i];
  }
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    j["ndcg@" + std::to_string(r.ks[i])] = r.ndcg[i];
  }
  j["auc"] = r.auc;
  return j;
}

inline json epoch_json(const EpochRecord& r) {
  return json{{"epoch", r.epoch},       {"l_f", r.l_f},         {"l_c", r.l_c},
              {"l_ind_g", r.l_ind_g},   {"l_ind_f", r.l_ind_f}, {"total", r.total},
              {"val_recall@20", r.val_recall20}, {"wall_seconds", r.wall_seconds}};
}

// ---- commands -------------------------------------------------------------

inline int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  CityConfig city = cfg.city;
  city.seed = cfg.seed;
  const City c = generate_city(city);
  const fs::path dir = prepare_out_dir(cfg);
  write_file(dir / "kg.tsv", serialize_triplets(c.kg));
  write_file(dir / "checkins.tsv", serialize_checkins(c.checkins));
  write_file(dir / "truth.txt", serialize_ground_truth(c.truth));
  write_file(dir / "config.txt", config_echo(cfg));
  out << json{{"command", "gen"},
              {"triplets", c.kg.triplets().size()},
              {"geo_triplets", c.geo_triplets},
              {"func_triplets", c.func_triplets},
              {"users", c.checkins.n_users()},
              {"pois", c.checkins.n_pois()},
              {"checkins", c.checkins.n_pairs()},
              {"same_region_rate", same_region_rate(c)},
              {"out_dir", cfg.out_dir}}
             .dump()
      << "\n";
  return 0;
}

inline int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const LoadedData data = load_data(cfg);
  const fs::path dir = prepare_out_dir(cfg);
  const Variant v = cfg.variant();
  const VariantSetup setup = setup_variant(data.kg, data.split.all.n_users(), v, cfg.shape);
  std::ofstream log(dir / "train_log.jsonl", std::ios::trunc);
  if (!log) throw Error(ErrorCode::Io, "cannot write " + (dir / "train_log.jsonl").string());
  FitOptions opts;
  opts.val_scorer = scorer_for(v);
  opts.on_epoch = [&](const EpochRecord& r) { log << epoch_json(r).dump() << "\n" << std::flush; };
  const FitResult fit_result = fit(data.split, setup.graphs, setup.dims, cfg.hp, cfg.seed, opts);
  write_file(cfg.checkpoint_path(), save_checkpoint(fit_result.params, setup.dims));
  write_file(dir / "config.txt", config_echo(cfg));
  out << json{{"command", "train"},
              {"variant", std::string(to_string(v))},
              {"epochs", fit_result.log.size()},
              {"best_epoch", fit_result.best_epoch},
              {"best_val_recall@20", fit_result.log.empty() ? 0.0 : fit_result.best_val},
              {"stopped_early", fit_result.stopped_early},
              {"checkpoint", cfg.checkpoint_path()},
              {"config_hash", config_hash(cfg)}}
             .dump()
      << "\n";
  return 0;
}

inline int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  const LoadedData data = load_data(cfg);
  const Scorer scorer = parse_scorer(cfg.scorer);
  const EvalTarget target = parse_target(cfg.split);
  const VariantSetup setup =
      setup_variant(data.kg, data.split.all.n_users(), cfg.variant(), cfg.shape);
  const Checkpoint ck = load_checkpoint(read_file(cfg.checkpoint_path()));
  if (!(ck.dims == setup.dims)) {
    throw Error(ErrorCode::DimsMismatch, "checkpoint dims {" + ck.dims.describe() +
                                             "} do not match data/config dims {" +
                                             setup.dims.describe() + "}");
  }
  const FinalEmbeddings finals = forward(ck.params, setup.graphs, data.split.train, setup.dims);
  EvalOptions opts;
  opts.target = target;
  opts.seed = cfg.seed;
  const MetricsReport report = evaluate(finals, data.split, scorer, opts);
  json j = metrics_json(report);
  if (!cfg.truth_path().empty()) {
    const GroundTruth truth = parse_ground_truth(read_file(cfg.truth_path()));
    j["functional_ndcg@20"] =
        functional_ndcg(ranked_lists(finals, data.split, scorer, target), truth, 20);
  }
  j["config_hash"] = config_hash(cfg);
  const fs::path dir = prepare_out_dir(cfg);
  const std::string name = "metrics_" + report.scorer + "_" + report.target + ".json";
  write_file(dir / name, j.dump(2) + "\n");
  write_file(dir / "config.txt", config_echo(cfg));
  out << j.dump() << "\n";
  return 0;
}

inline int cmd_ablate(const RunConfig& cfg, std::ostream& out) {
  const LoadedData data = load_data(cfg);
  const fs::path dir = prepare_out_dir(cfg);
  std::optional<GroundTruth> truth;
  if (!cfg.truth_path().empty()) truth = parse_ground_truth(read_file(cfg.truth_path()));
  std::ofstream rows(dir / "ablation.jsonl", std::ios::trunc);
  if (!rows) throw Error(ErrorCode::Io, "cannot write " + (dir / "ablation.jsonl").string());

  std::vector<VariantRun> runs;
  for (Variant v : {Variant::Full, Variant::TeOnly, Variant::NoDisentangle}) {
    runs.push_back(run_variant(data.kg, data.split, v, cfg.shape, cfg.hp, cfg.seed,
                               truth ? &*truth : nullptr));
    const VariantRun& r = runs.back();
    json j{{"variant", std::string(to_string(v))},
           {"geo_triplets", r.setup.geo_triplets},
           {"func_triplets", r.setup.func_triplets},
           {"kg_triplets", data.kg.triplets().size()},
           {"epochs", r.fit.log.size()},
           {"best_epoch", r.fit.best_epoch}};
    j.update(metrics_json(r.test));
    if (truth) j["functional_ndcg@20"] = r.functional_ndcg20;
    j["config_hash"] = config_hash(cfg);
    rows << j.dump() << "\n";
    if (v == Variant::NoDisentangle) {
      out << "# no_disentangle propagates the unsplit KG on both chunks: geo_triplets="
          << r.setup.geo_triplets << " func_triplets=" << r.setup.func_triplets
          << " kg_triplets=" << data.kg.triplets().size() << "\n";
    }
  }
  write_file(dir / "config.txt", config_echo(cfg));

  const auto& ks = runs.front().test.ks;
  std::ostringstream table;
  table << std::left << std::setw(16) << "variant";
  for (std::size_t k : ks) table << std::setw(12) << ("Recall@" + std::to_string(k));
  for (std::size_t k : ks) table << std::setw(12) << ("NDCG@" + std::to_string(k));
  if (truth) table << "fNDCG@20";
  table << "\n" << std::fixed << std::setprecision(4);
  for (const VariantRun& r : runs) {
    table << std::setw(16) << to_string(r.variant);
    for (double x : r.test.recall) table << std::setw(12) << x;
    for (double x : r.test.ndcg) table << std::setw(12) << x;
    if (truth) table << r.functional_ndcg20;
    table << "\n";
  }
  out << table.str();
  return 0;
}

inline int cmd_gradcheck(const std::string& corrupt_tensor, std::ostream& out) {
  const GradCheckInput in = tiny_gradcheck_input();
  std::function<void(Gradients&)> tamper;
  if (!corrupt_tensor.empty()) {
    bool known = false;
    for_each_tensor(in.params,
                    [&](std::string_view name, const Matrix&) { known |= name == corrupt_tensor; });
    if (!known) throw Error(ErrorCode::InvalidConfig, "unknown tensor '" + corrupt_tensor + "'");
    tamper = [corrupt_tensor](Gradients& g) {
      for_each_tensor(g, [&](std::string_view name, Matrix& m) {
        if (name == corrupt_tensor) m(0, 0) += 1.0;
      });
    };
  }
  const GradCheckReport report = gradient_check(in, 1e-4, 1e-4, tamper);
  std::ostringstream os;
  os << std::setprecision(6);
  for (const TensorCheck& t : report.tensors) {
    os << "tensor=" << t.name << " max_rel_error=" << t.max_rel_error << " worst=(" << t.worst_row
       << "," << t.worst_col << ") analytic=" << t.analytic << " numeric=" << t.numeric << "\n";
  }
  if (report.passed()) {
    os << "gradcheck PASS max_rel_error=" << report.max_rel_error << " tolerance=" << report.tolerance
       << "\n";
  } else {
    os << "gradcheck FAIL tensor=" << report.worst_tensor() << " max_rel_error=" << report.max_rel_error
       << " tolerance=" << report.tolerance << "\n";
  }
  out << os.str();
  return report.passed() ? 0 : 1;
}

// ---- entry point ------------------------------------------------------------

inline std::string quote(std::string_view s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Urban-KG counterfactual recommender: data generation, training and evaluation"};
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> assignments;
  std::map<std::string, std::string> flags;
  std::string corrupt_tensor;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "flat key=value config file");
    sub->add_option("--set", assignments, "override a config key (key=value), repeatable");
    sub->add_option("--seed", flags["seed"], "root seed");
    sub->add_option("--out", flags["out_dir"], "output directory");
    sub->add_option("--data", flags["data_dir"], "directory holding kg.tsv and checkins.tsv");
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--kg", flags["kg"], "KG triplet TSV");
    sub->add_option("--checkins", flags["checkins"], "check-in TSV");
    sub->add_option("--truth", flags["truth"], "ground-truth file (enables functional NDCG)");
    sub->add_flag("--no-disentangle{true}", flags["no_disentangle"],
                  "propagate the unsplit KG on both chunks");
    sub->add_flag("--te-only{true}", flags["te_only"], "score with TE instead of TIE");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic city");
  add_common(gen);
  gen->add_option("--geo-strength", flags["geo_strength"], "confounder strength");

  CLI::App* train = app.add_subcommand("train", "train and write the best checkpoint");
  add_common(train);
  add_data(train);
  train->add_option("--max-epochs", flags["max_epochs"], "epoch cap");
  train->add_option("--checkpoint", flags["checkpoint"], "checkpoint path to write");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval);
  add_data(eval);
  eval->add_option("--checkpoint", flags["checkpoint"], "checkpoint to load");
  eval->add_option("--scorer", flags["scorer"], "TIE | TE | YUP");
  eval->add_option("--split", flags["split"], "val | test");

  CLI::App* ablate = app.add_subcommand("ablate", "full vs TE-only vs no-disentangle");
  add_common(ablate);
  add_data(ablate);
  ablate->add_option("--max-epochs", flags["max_epochs"], "epoch cap");

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("--corrupt-tensor", corrupt_tensor)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error code=Usage message=" << quote(e.what()) << "\n";
    return 2;
  }

  try {
    if (gradcheck->parsed()) return cmd_gradcheck(corrupt_tensor, out);
    RunConfig cfg;
    if (!config_file.empty()) apply_config_text(cfg, read_file(config_file));
    for (const auto& a : assignments) apply_assignment(cfg, a);
    for (const auto& [key, value] : flags) {
      if (!value.empty()) set_key(cfg, key, value);
    }
    cfg.hp.validate();
    if (gen->parsed()) return cmd_gen(cfg, out);
    if (train->parsed()) return cmd_train(cfg, out);
    if (eval->parsed()) return cmd_eval(cfg, out);
    if (ablate->parsed()) return cmd_ablate(cfg, out);
  } catch (const Error& e) {
    err << "error code=" << to_string(e.code()) << " message=" << quote(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error code=Internal message=" << quote(e.what()) << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ukgc::cli
