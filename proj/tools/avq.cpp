// Copyright 2026 The annealvq Authors
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

// avq: command-line front end for training, encoding and searching additive
// codebooks. Exit codes: 0 ok, 2 usage/config, 3 data/format, 4 internal.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "annealvq/adc.hpp"
#include "annealvq/annealing.hpp"
#include "annealvq/atree.hpp"
#include "annealvq/atree_io.hpp"
#include "annealvq/codebook_io.hpp"
#include "annealvq/diagnostics.hpp"
#include "annealvq/encoding.hpp"
#include "annealvq/errors.hpp"
#include "annealvq/evaluation.hpp"
#include "annealvq/knn.hpp"
#include "annealvq/parallel.hpp"
#include "annealvq/reports.hpp"
#include "annealvq/rng.hpp"
#include "annealvq/synthetic.hpp"
#include "annealvq/vecs_io.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace annealvq;
using avq::RunConfig;

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex(const Fingerprint& f) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (std::uint8_t b : f) {
    out += digits[b >> 4];
    out += digits[b & 15];
  }
  return out;
}

ConfigEcho echo_of(const RunConfig& cfg, const std::string& command) {
  ConfigEcho echo = cfg.entries();
  echo["command"] = command;
  return echo;
}

void write_sidecar(const fs::path& artifact, ConfigEcho entries) {
  write_metadata(artifact.string() + ".meta", entries);
}

std::ofstream open_text(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

VectorSet load_vectors(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".fvecs") return read_fvecs(path);
  if (ext == ".bvecs") return read_bvecs(path);
  throw InputError(path + ": expected a .fvecs or .bvecs file");
}

std::size_t threads_of(const RunConfig& cfg) { return resolve_threads(cfg.size("threads")); }

TrainConfig train_config(const RunConfig& cfg) {
  TrainConfig tc;
  tc.m_count = cfg.size("m");
  tc.k_count = cfg.size("k");
  tc.beam_width = cfg.size("beam");
  tc.schedule_stages = cfg.size("schedule");
  tc.sweeps = cfg.size("sweeps");
  tc.rel_tol = cfg.real("rel_tol");
  tc.seed = derive_seed(cfg.u64("seed"), "train");
  tc.max_iters = cfg.size("max_iters");
  tc.threads = threads_of(cfg);
  tc.validate();
  return tc;
}

double final_distortion(const TrainReport& report) {
  return report.steps.empty() ? report.initial_distortion : report.steps.back().distortion;
}

// Codes carry their producer's fingerprint in the sidecar, when there is one.
EncodedDataset load_codes(const std::string& path) {
  EncodedDataset codes = read_encoded(path);
  const fs::path meta = path + ".meta";
  if (fs::exists(meta)) {
    const auto entries = read_metadata(meta);
    if (const auto it = entries.find("codebook_sha256"); it != entries.end()) {
      Fingerprint f{};
      if (it->second.size() != 64) throw FormatError(meta.string() + ": malformed codebook_sha256");
      for (std::size_t i = 0; i < 32; ++i) {
        f[i] = static_cast<std::uint8_t>(std::stoul(it->second.substr(2 * i, 2), nullptr, 16));
      }
      codes.set_codebook_fingerprint(f);
    }
  }
  return codes;
}

void save_codebook(const fs::path& path, const Codebook& codebook, const TrainReport& report,
                   ConfigEcho echo) {
  write_codebook(path, codebook);
  echo["codebook_sha256"] = hex(codebook.fingerprint());
  echo["distortion"] = exact(final_distortion(report));
  echo["sweeps_completed"] = report.steps.empty() ? "0" : std::to_string(report.steps.back().sweep);
  auto csv = open_text(path.string() + ".train.csv");
  write_train_report_csv(csv, report, echo);
  write_sidecar(path, std::move(echo));
}

void save_codes(const fs::path& path, const EncodedDataset& codes, const Codebook& codebook,
                double dist, ConfigEcho echo) {
  write_encoded(path, codes);
  echo["codebook_sha256"] = hex(codebook.fingerprint());
  echo["distortion"] = exact(dist);
  write_sidecar(path, std::move(echo));
}

int cmd_gen(const RunConfig& cfg) {
  SyntheticSpec spec;
  const std::string& dist = cfg.text("distribution");
  if (dist == "mixture") {
    spec.mode = SyntheticMode::kGaussianMixture;
  } else if (dist == "uniform") {
    spec.mode = SyntheticMode::kUniform;
  } else {
    throw InputError("distribution must be 'mixture' or 'uniform', got '" + dist + "'");
  }
  spec.clusters = cfg.size("clusters");
  spec.spread = cfg.real("spread");
  const fs::path out = cfg.require("out");
  write_fvecs(out, generate_synthetic(cfg.size("n"), cfg.size("d"), spec,
                                      derive_seed(cfg.u64("seed"), "gen"), cfg.u64("stream")));
  write_sidecar(out, echo_of(cfg, "gen"));
  return 0;
}

int cmd_ground_truth(const RunConfig& cfg) {
  const VectorSet base = load_vectors(cfg.require("base"));
  const VectorSet queries = load_vectors(cfg.require("queries"));
  const fs::path out = cfg.require("out");
  write_ivecs(out, to_int_matrix(brute_force_knn(base, queries, cfg.size("depth"), threads_of(cfg))));
  write_sidecar(out, echo_of(cfg, "ground-truth"));
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  const std::string mode = cfg.text("mode");
  const fs::path out = cfg.require("out");
  const ConfigEcho echo = echo_of(cfg, "train");
  TrainConfig tc = train_config(cfg);

  if (mode == "scratch" || mode == "refine") {
    const VectorSet data = load_vectors(cfg.has("learn") ? cfg.text("learn") : cfg.require("base"));
    Codebook codebook;
    EncodedDataset codes;
    TrainReport report;
    if (mode == "scratch") {
      TrainResult r = train_from_scratch(data, tc);
      codebook = std::move(r.codebook);
      codes = std::move(r.codes);
      report = std::move(r.report);
    } else {
      codebook = read_codebook(cfg.require("codebook"));
      codes = load_codes(cfg.require("codes"));
      if (const Fingerprint* f = codes.codebook_fingerprint(); f && *f != codebook.fingerprint()) {
        throw InputError(cfg.text("codes") + " was encoded with a different codebook");
      }
      tc.m_count = codebook.m_count();
      tc.k_count = codebook.k_count();
      report = refine(data, codebook, codes, tc);
    }
    save_codebook(out, codebook, report, echo);
    if (cfg.has("codes_out")) {
      save_codes(cfg.text("codes_out"), codes, codebook, final_distortion(report), echo);
    }
    std::cout << "distortion=" << exact(final_distortion(report)) << '\n';
    return 0;
  }

  if (mode != "online") {
    throw InputError("mode must be 'scratch', 'refine' or 'online', got '" + mode + "'");
  }
  const auto batches = cfg.list("batches");
  if (batches.empty()) throw InputError("online training needs at least one batch in 'batches'");
  std::optional<Codebook> codebook;
  if (cfg.has("codebook")) {
    codebook = read_codebook(cfg.text("codebook"));
    tc.m_count = codebook->m_count();
    tc.k_count = codebook->k_count();
  }
  TrainReport report;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const VectorSet batch = load_vectors(batches[b]);
    if (!codebook) {
      TrainResult r = train_from_scratch(batch, tc);
      codebook = std::move(r.codebook);
      report = std::move(r.report);
    } else {
      OnlineResult r = train_online(*codebook, batch, tc);
      codebook = std::move(r.codebook);
      report = std::move(r.report);
    }
    fs::path checkpoint = out;
    checkpoint.replace_extension(".batch" + std::to_string(b + 1) + out.extension().string());
    ConfigEcho batch_echo = echo;
    batch_echo["batch"] = std::to_string(b + 1);
    batch_echo["batch_path"] = batches[b];
    save_codebook(checkpoint, *codebook, report, batch_echo);
    std::cout << "batch=" << b + 1 << " distortion=" << exact(final_distortion(report)) << '\n';
  }
  save_codebook(out, *codebook, report, echo);
  return 0;
}

int cmd_encode(const RunConfig& cfg) {
  const Codebook codebook = read_codebook(cfg.require("codebook"));
  const VectorSet data = load_vectors(cfg.require("base"));
  const fs::path out = cfg.require("out");
  const std::size_t threads = threads_of(cfg);
  const EncodedDataset codes = encode_dataset(codebook, data, cfg.size("beam"), threads);
  const double dist = distortion(codebook, data, codes, threads);
  save_codes(out, codes, codebook, dist, echo_of(cfg, "encode"));
  std::cout << "distortion=" << exact(dist) << '\n';
  return 0;
}

int cmd_build_tree(const RunConfig& cfg) {
  const Codebook codebook = read_codebook(cfg.require("codebook"));
  const EncodedDataset codes = load_codes(cfg.require("codes"));
  const fs::path out = cfg.require("out");
  const ATree tree = build_atree(codes, codebook, CrossProductTable(codebook));
  serialize_atree(tree, out);
  ConfigEcho echo = echo_of(cfg, "build-tree");
  echo["codebook_sha256"] = hex(codebook.fingerprint());
  echo["nodes"] = std::to_string(tree.node_count());
  echo["leaves"] = std::to_string(tree.leaf_count());
  echo["internal"] = std::to_string(tree.internal_count());
  write_sidecar(out, std::move(echo));
  std::cout << "nodes=" << tree.node_count() << " leaves=" << tree.leaf_count()
            << " internal=" << tree.internal_count() << '\n';
  return 0;
}

int cmd_search(const RunConfig& cfg) {
  const Codebook codebook = read_codebook(cfg.require("codebook"));
  const VectorSet queries = load_vectors(cfg.require("queries"));
  const std::size_t r = cfg.size("r");
  if (r == 0) throw InputError("r must be at least 1");
  const ConfigEcho echo = echo_of(cfg, "search");

  std::vector<std::vector<Neighbor>> results(queries.size());
  std::vector<SearchStats> stats(queries.size());
  if (cfg.flag("exhaustive")) {
    const EncodedDataset codes = load_codes(cfg.require("codes"));
    const CrossProductTable cross(codebook);
    const AdcScanner scanner(codebook, cross, codes);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      results[q] = scanner.search(queries.row(q), std::min(r, codes.size()));
    }
  } else {
    const ATree tree = deserialize_atree(cfg.require("tree"));
    const SearchParams params =
        SearchParams::geometric(tree.m_count(), cfg.real("l0"), cfg.real("ls"), r);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      SearchResult res = atree_search(tree, codebook, queries.row(q), params);
      results[q] = std::move(res.neighbors);
      stats[q] = std::move(res.stats);
    }
  }

  std::ofstream file;
  if (cfg.has("out")) file = open_text(cfg.text("out"));
  std::ostream& out = cfg.has("out") ? static_cast<std::ostream&>(file) : std::cout;
  write_csv_echo(out, echo);
  const std::vector<std::string> header{"query", "rank", "id", "distance"};
  write_csv_row(out, header);
  for (std::size_t q = 0; q < results.size(); ++q) {
    for (std::size_t k = 0; k < results[q].size(); ++k) {
      const std::vector<std::string> row{std::to_string(q), std::to_string(k + 1),
                                         std::to_string(results[q][k].id),
                                         exact(results[q][k].distance)};
      write_csv_row(out, row);
    }
  }
  if (cfg.has("out")) {
    auto s = open_text(cfg.text("out") + ".stats.csv");
    write_csv_echo(s, echo);
    const std::vector<std::string> sh{"query", "nodes_visited", "table_ns", "traversal_ns",
                                      "layer_sizes"};
    write_csv_row(s, sh);
    for (std::size_t q = 0; q < stats.size(); ++q) {
      std::string layers;
      for (std::size_t v : stats[q].layer_sizes) layers += (layers.empty() ? "" : ";") + std::to_string(v);
      const std::vector<std::string> row{std::to_string(q), std::to_string(stats[q].nodes_visited),
                                         std::to_string(stats[q].table_time.count()),
                                         std::to_string(stats[q].traversal_time.count()), layers};
      write_csv_row(s, row);
    }
  }
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  const Codebook codebook = read_codebook(cfg.require("codebook"));
  const VectorSet queries = load_vectors(cfg.require("queries"));
  const GroundTruth gt = from_int_matrix(read_ivecs(cfg.require("ground_truth")));
  const std::size_t r = cfg.size("r");
  const fs::path out = cfg.require("out");
  const ConfigEcho echo = echo_of(cfg, "eval");

  std::optional<EncodedDataset> codes;
  if (cfg.has("codes")) codes = load_codes(cfg.text("codes"));
  VectorSet base;
  if (cfg.has("base")) base = load_vectors(cfg.text("base"));
  const EncodedDataset* encoded = codes && !base.empty() ? &*codes : nullptr;

  std::vector<EvalReport> reports;
  if (cfg.has("tree")) {
    const ATree tree = deserialize_atree(cfg.text("tree"));
    const double ls = cfg.real("ls");
    for (const std::string& l0 : cfg.list("l0")) {
      RunConfig one = cfg;
      one.set("l0", l0);
      TreeIndex index{&tree, &codebook, SearchParams::geometric(tree.m_count(), one.real("l0"), ls, r)};
      EvalReport rep = evaluate(index, base, queries, gt, r, encoded);
      rep.parameters["l0"] = l0;
      rep.parameters["ls"] = cfg.text("ls");
      reports.push_back(std::move(rep));
    }
  }
  if (cfg.flag("exhaustive") || !cfg.has("tree")) {
    if (!codes) throw InputError("exhaustive evaluation needs 'codes'");
    const CrossProductTable cross(codebook);
    const AdcScanner scanner(codebook, cross, *codes);
    reports.push_back(evaluate(ExhaustiveIndex{&scanner}, base, queries, gt, r, encoded));
  }

  auto csv = open_text(out);
  write_eval_csv(csv, reports, echo);
  fs::path json_path = out;
  json_path.replace_extension(".json");
  auto json = open_text(json_path);
  json << eval_json(reports, echo);
  for (const EvalReport& rep : reports) {
    std::cout << rep.method;
    if (rep.parameters.contains("l0")) std::cout << " l0=" << rep.parameters.at("l0");
    for (const auto& [cutoff, value] : rep.recall) std::cout << " recall@" << cutoff << '=' << value;
    std::cout << " mean_ms=" << rep.mean_latency_ms << '\n';
  }
  return 0;
}

int cmd_diagnose(const RunConfig& cfg) {
  const EncodedDataset codes = load_codes(cfg.require("codes"));
  const std::string out = cfg.require("out");
  const ConfigEcho echo = echo_of(cfg, "diagnose");
  const std::string& est = cfg.text("estimator");
  EntropyEstimator estimator;
  if (est == "grassberger") {
    estimator = EntropyEstimator::kGrassberger;
  } else if (est == "plugin") {
    estimator = EntropyEstimator::kPlugIn;
  } else {
    throw InputError("estimator must be 'grassberger' or 'plugin', got '" + est + "'");
  }
  const std::uint64_t seed = derive_seed(cfg.u64("seed"), "eval");
  const MiMatrix mi = mi_matrix(codes, {cfg.size("sample_cap"), seed, estimator});
  {
    auto f = open_text(out + ".mi.csv");
    write_mi_csv(f, mi);
  }

  std::optional<LocalityProfile> locality;
  if (cfg.has("base")) {
    const VectorSet base = load_vectors(cfg.text("base"));
    if (base.size() != codes.size()) {
      throw InputError("diagnose: base has " + std::to_string(base.size()) + " vectors but codes have " +
                       std::to_string(codes.size()));
    }
    const std::size_t neighbors = cfg.size("neighbors");
    const std::size_t anchor_count = std::min(cfg.size("anchors"), base.size());
    std::vector<std::size_t> all(base.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<std::size_t> anchors;
    std::mt19937_64 rng(derive_seed(cfg.u64("seed"), "anchors"));
    std::sample(all.begin(), all.end(), std::back_inserter(anchors), anchor_count, rng);
    const VectorSet anchor_set = base.gather(anchors);
    GroundTruth gt = brute_force_knn(base, anchor_set, std::min(neighbors + 1, base.size()),
                                     threads_of(cfg));
    gt.anchor_ids.assign(anchors.begin(), anchors.end());
    locality = locality_profile(codes, gt, std::min(neighbors, gt.depth), estimator);
    auto f = open_text(out + ".locality.csv");
    write_locality_csv(f, *locality, echo);
  }
  auto json = open_text(out + ".json");
  json << diagnostics_json(mi, locality ? &*locality : nullptr, echo);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"avq: additive codebooks with dictionary annealing and tree search"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path;
  std::map<std::string, std::string> overrides;
  app.add_option("--config", config_path, "key = value settings file (flags win)");

  auto setting = [&overrides](CLI::App* sub, const std::string& flag, const std::string& key,
                              const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };
  setting(&app, "--seed", "seed", "root seed for every random stream");
  setting(&app, "--threads", "threads", "worker threads, 0 = all cores");

  auto* gen = app.add_subcommand("gen", "write a synthetic .fvecs dataset");
  setting(gen, "--n", "n", "vector count");
  setting(gen, "--d", "d", "dimension");
  setting(gen, "--clusters", "clusters", "mixture components");
  setting(gen, "--spread", "spread", "component standard deviation");
  setting(gen, "--distribution", "distribution", "mixture or uniform");
  setting(gen, "--stream", "stream", "sample stream (0 base, 1 queries, ...)");
  setting(gen, "--out", "out", "output .fvecs");

  auto* gt = app.add_subcommand("ground-truth", "exact nearest neighbours as .ivecs");
  setting(gt, "--base", "base", "base vectors");
  setting(gt, "--queries", "queries", "query vectors");
  setting(gt, "--depth", "depth", "neighbours per query");
  setting(gt, "--out", "out", "output .ivecs");

  auto* train = app.add_subcommand("train", "learn a codebook");
  setting(train, "--mode", "mode", "scratch, refine or online");
  setting(train, "--learn", "learn", "training vectors (defaults to base)");
  setting(train, "--base", "base", "training vectors");
  setting(train, "--batches", "batches", "comma separated batch files (online)");
  setting(train, "--codebook", "codebook", "starting codebook (refine, online)");
  setting(train, "--codes", "codes", "codes of the training vectors (refine)");
  setting(train, "--codes-out", "codes_out", "write the final training codes here");
  setting(train, "-M,--m", "m", "dictionaries");
  setting(train, "-K,--k", "k", "codewords per dictionary");
  setting(train, "--beam", "beam", "encoding beam width");
  setting(train, "--schedule", "schedule", "dimension schedule stages");
  setting(train, "--sweeps", "sweeps", "maximum annealing sweeps");
  setting(train, "--rel-tol", "rel_tol", "stop when a sweep gains less than this");
  setting(train, "--max-iters", "max_iters", "Lloyd iterations per stage");
  setting(train, "--out", "out", "output codebook");

  auto* encode = app.add_subcommand("encode", "encode vectors with a codebook");
  setting(encode, "--codebook", "codebook", "codebook file");
  setting(encode, "--base", "base", "vectors to encode");
  setting(encode, "--beam", "beam", "beam width");
  setting(encode, "--out", "out", "output codes");

  auto* build = app.add_subcommand("build-tree", "build the search tree over codes");
  setting(build, "--codebook", "codebook", "codebook file");
  setting(build, "--codes", "codes", "encoded base");
  setting(build, "--out", "out", "output tree");

  auto* search = app.add_subcommand("search", "answer queries");
  setting(search, "--codebook", "codebook", "codebook file");
  setting(search, "--tree", "tree", "tree file");
  setting(search, "--codes", "codes", "encoded base (exhaustive)");
  setting(search, "--queries", "queries", "query vectors");
  setting(search, "--l0", "l0", "first-layer budget (inf = no pruning)");
  setting(search, "--ls", "ls", "budget growth per layer");
  setting(search, "-R,--r", "r", "results per query");
  setting(search, "--out", "out", "results CSV (stdout when absent)");
  search->add_flag_callback("--exhaustive", [&overrides] { overrides["exhaustive"] = "true"; },
                            "scan all codes instead of the tree");

  auto* eval = app.add_subcommand("eval", "recall and latency over a budget sweep");
  setting(eval, "--codebook", "codebook", "codebook file");
  setting(eval, "--tree", "tree", "tree file");
  setting(eval, "--codes", "codes", "encoded base");
  setting(eval, "--base", "base", "base vectors (for distortion)");
  setting(eval, "--queries", "queries", "query vectors");
  setting(eval, "--ground-truth", "ground_truth", "exact neighbours .ivecs");
  setting(eval, "--l0", "l0", "comma separated first-layer budgets");
  setting(eval, "--ls", "ls", "budget growth per layer");
  setting(eval, "-R,--r", "r", "results per query");
  setting(eval, "--out", "out", "output CSV; JSON goes next to it");
  eval->add_flag_callback("--exhaustive", [&overrides] { overrides["exhaustive"] = "true"; },
                          "add an exhaustive scan row");

  auto* diag = app.add_subcommand("diagnose", "entropy and locality of codes");
  setting(diag, "--codes", "codes", "encoded base");
  setting(diag, "--base", "base", "base vectors (enables locality)");
  setting(diag, "--anchors", "anchors", "anchor sample size");
  setting(diag, "--neighbors", "neighbors", "neighbourhood size per anchor");
  setting(diag, "--sample-cap", "sample_cap", "rows sampled for the MI matrix");
  setting(diag, "--estimator", "estimator", "grassberger or plugin");
  setting(diag, "--out", "out", "output prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "gen") return cmd_gen(cfg);
    if (name == "ground-truth") return cmd_ground_truth(cfg);
    if (name == "train") return cmd_train(cfg);
    if (name == "encode") return cmd_encode(cfg);
    if (name == "build-tree") return cmd_build_tree(cfg);
    if (name == "search") return cmd_search(cfg);
    if (name == "eval") return cmd_eval(cfg);
    if (name == "diagnose") return cmd_diagnose(cfg);
    throw InvariantError("unhandled command " + name);
  } catch (const InputError& e) {
    std::cerr << "avq: error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "avq: error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "avq: internal error: " << e.what() << '\n';
    return 4;
  }
}
