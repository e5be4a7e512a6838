#include "sparsepac/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "sparsepac/errors.hpp"

namespace sparsepac {
namespace {

// JSON has no infinities; they go out as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad field '") + key + "': " + e.what());
  }
}

json stats_to_json(const MoveStats& s) { return {{"proposed", s.proposed}, {"accepted", s.accepted}}; }

MoveStats stats_from_json(const json& j) {
  return {get<std::size_t>(j, "proposed"), get<std::size_t>(j, "accepted")};
}

json active_list(const SparseParams& p) {
  json active = json::array();
  for (std::size_t t : p.active()) active.push_back({t, p.value(t)});
  return active;
}

SparseParams params_from_active(const Architecture& arch, const json& active) {
  if (!active.is_array()) throw FormatError("'active' must be an array of [index, value] pairs");
  std::vector<std::pair<std::size_t, double>> entries;
  entries.reserve(active.size());
  for (const json& e : active) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number()) {
      throw FormatError("'active' entries must be [index, value] pairs");
    }
    entries.emplace_back(e[0].get<std::size_t>(), e[1].get<double>());
  }
  try {
    return SparseParams::from_active(arch, entries);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid parameters: ") + e.what());
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw FormatError("line " + std::to_string(line_no) + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buf, ptr);
}

json to_json(const Architecture& arch) {
  return {{"d", arch.input_dim()},
          {"L", arch.depth()},
          {"D", arch.width()},
          {"S", arch.sparsity()},
          {"C_B", arch.coef_bound()},
          {"T", arch.num_params()}};
}

Architecture architecture_from_json(const json& j) {
  const double cb = j.contains("C_B") ? get<double>(j, "C_B") : 2.0;
  try {
    const Architecture arch(get<std::size_t>(j, "d"), get<std::size_t>(j, "L"),
                            get<std::size_t>(j, "D"), get<std::size_t>(j, "S"), cb);
    if (j.contains("T") && get<std::size_t>(j, "T") != arch.num_params()) {
      throw FormatError("stored T disagrees with (d, L, D)");
    }
    return arch;
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid architecture: ") + e.what());
  }
}

json to_json(const Slab& slab) { return {{"levels", slab.levels}}; }

Slab slab_from_json(const json& j) {
  const auto levels = get<std::size_t>(j, "levels");
  return levels == 0 ? Slab::continuous() : Slab::quantized(levels);
}

json to_json(const SparseParams& params) {
  return {{"schema_version", kSchemaVersion}, {"arch", to_json(params.arch())}, {"active", active_list(params)}};
}

SparseParams params_from_json(const json& j) {
  if (!j.is_object() || !j.contains("arch") || !j.contains("active")) {
    throw FormatError("parameter file needs 'arch' and 'active'");
  }
  return params_from_active(architecture_from_json(j.at("arch")), j.at("active"));
}

json to_json(const ChainConfig& cfg) {
  return {{"lambda", cfg.lambda},     {"steps", cfg.steps},         {"burn_in", cfg.burn_in},
          {"thin", cfg.thin},         {"step_size", cfg.step_size}, {"swap_prob", cfg.swap_prob},
          {"seed", cfg.seed},         {"chains", cfg.chains},       {"slab", to_json(cfg.slab)},
          {"keep_draws", cfg.keep_draws}};
}

ChainConfig chain_config_from_json(const json& j) {
  ChainConfig cfg;
  cfg.lambda = get<double>(j, "lambda");
  cfg.steps = get<std::size_t>(j, "steps");
  cfg.burn_in = get<std::size_t>(j, "burn_in");
  cfg.thin = get<std::size_t>(j, "thin");
  cfg.step_size = get<double>(j, "step_size");
  cfg.swap_prob = get<double>(j, "swap_prob");
  cfg.seed = get<std::uint64_t>(j, "seed");
  cfg.chains = get<std::size_t>(j, "chains");
  cfg.slab = slab_from_json(j.at("slab"));
  cfg.keep_draws = get<bool>(j, "keep_draws");
  return cfg;
}

json to_json(const ChainResult& result) {
  json tails = json::array();
  for (const ChainTail& t : result.tails) {
    tails.push_back({{"active", active_list(t.current.params)},
                     {"hinge", t.current.hinge},
                     {"rng_state", t.rng_state},
                     {"steps_done", t.steps_done},
                     {"weight_moves", stats_to_json(t.weight)},
                     {"swap_moves", stats_to_json(t.swap)},
                     {"swaps_skipped", t.swaps_skipped}});
  }
  json draws = json::array();
  for (const SparseParams& p : result.draws) draws.push_back(active_list(p));
  return {{"schema_version", kSchemaVersion},
          {"arch", to_json(result.arch)},
          {"config", to_json(result.config)},
          {"chain_lengths", result.chain_lengths},
          {"hinge_trace", result.hinge_trace},
          {"draws", std::move(draws)},
          {"tails", std::move(tails)},
          {"weight_moves", stats_to_json(result.weight_moves)},
          {"swap_moves", stats_to_json(result.swap_moves)},
          {"swaps_skipped", result.swaps_skipped},
          {"mean_hinge", result.mean_hinge},
          {"mean_hinge_se", result.mean_hinge_se}};
}

ChainResult chain_result_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("checkpoint must be a JSON object");
  const Architecture arch = architecture_from_json(j.at("arch"));
  ChainResult r{chain_config_from_json(j.at("config")), arch, {}, {}, {}, {}, {}, {}, 0, 0.0, 0.0};
  r.chain_lengths = get<std::vector<std::size_t>>(j, "chain_lengths");
  r.hinge_trace = get<std::vector<double>>(j, "hinge_trace");
  for (const json& d : j.at("draws")) r.draws.push_back(params_from_active(arch, d));
  for (const json& t : j.at("tails")) {
    r.tails.push_back(ChainTail{ChainState{params_from_active(arch, t.at("active")), get<double>(t, "hinge")},
                                get<std::string>(t, "rng_state"), get<std::size_t>(t, "steps_done"),
                                stats_from_json(t.at("weight_moves")),
                                stats_from_json(t.at("swap_moves")),
                                get<std::size_t>(t, "swaps_skipped")});
  }
  r.weight_moves = stats_from_json(j.at("weight_moves"));
  r.swap_moves = stats_from_json(j.at("swap_moves"));
  r.swaps_skipped = get<std::size_t>(j, "swaps_skipped");
  r.mean_hinge = get<double>(j, "mean_hinge");
  r.mean_hinge_se = get<double>(j, "mean_hinge_se");
  std::size_t total = 0;
  for (std::size_t len : r.chain_lengths) total += len;
  if (total != r.hinge_trace.size() || r.tails.size() != r.chain_lengths.size() ||
      r.tails.size() != r.config.chains) {
    throw FormatError("checkpoint traces, tails and chain count disagree");
  }
  if (!r.draws.empty() && r.draws.size() != r.hinge_trace.size()) {
    throw FormatError("checkpoint draws do not match the trace");
  }
  return r;
}

json to_json(const ThermoEstimate& est) {
  return {{"lambda", est.lambda},
          {"log_z", est.log_z},
          {"std_error", est.std_error},
          {"betas", est.betas},
          {"mean_hinge", est.mean_hinge},
          {"mean_hinge_se", est.mean_hinge_se}};
}

json to_json(const BoundReport& report) {
  json terms = json::array();
  for (const BoundTerm& t : report.terms) {
    terms.push_back({{"name", t.name}, {"value", number(t.value)}, {"std_error", number(t.std_error)}});
  }
  return {{"rate_mode", to_string(report.rate_mode)},
          {"complexity_term", number(report.complexity_term)},
          {"confidence_term", number(report.confidence_term)},
          {"epsilon", report.epsilon},
          {"lambda_used", number(report.lambda_used)},
          {"c_user", report.c_user},
          {"total", number(report.total)},
          {"total_std_error", number(report.total_std_error)},
          {"terms", std::move(terms)},
          {"notes", report.notes}};
}

json to_json(const SelectionResult& result) {
  json scores = json::array();
  for (const CandidateScore& s : result.scores) {
    json e = {{"arch", to_json(s.arch)},
              {"objective", number(s.objective)},
              {"std_error", number(s.std_error)},
              {"log_belief", number(s.log_belief)},
              {"log_z", number(s.log_z)},
              {"log_z_se", number(s.log_z_se)},
              {"rejected", s.rejected}};
    if (!s.reason.empty()) e["reason"] = s.reason;
    scores.push_back(std::move(e));
  }
  return {{"scores", std::move(scores)}, {"best", result.best}, {"selected", to_json(result.selected())}};
}

json to_json(const Scorecard& card) {
  json checks = json::array();
  for (const CheckRecord& c : card.checks) {
    checks.push_back({{"name", c.name},
                      {"statistic", number(c.statistic)},
                      {"bound", number(c.bound)},
                      {"passed", c.passed},
                      {"flag_only", c.flag_only},
                      {"detail", c.detail}});
  }
  return {{"seed", card.seed}, {"all_passed", card.all_passed()}, {"checks", std::move(checks)}};
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  for (std::size_t k = 0; k < data.dim(); ++k) out << 'x' << (k + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out << format_double(v) << ',';
    out << data.label(i) << '\n';
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line, ',');
  if (header.size() < 2 || header.back() != "y") throw FormatError("header must read x1,...,xd,y");
  const std::size_t d = header.size() - 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (header[k] != "x" + std::to_string(k + 1)) throw FormatError("header must read x1,...,xd,y");
  }
  std::vector<double> features;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != d + 1) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(d + 1) + " fields");
    }
    for (std::size_t k = 0; k < d; ++k) features.push_back(parse_double(cells[k], line_no));
    const double y = parse_double(cells[d], line_no);
    if (y != 1.0 && y != -1.0) throw InputError("line " + std::to_string(line_no) + ": label must be -1 or 1");
    labels.push_back(static_cast<int>(y));
  }
  if (labels.empty()) throw FormatError(path.string() + " holds no rows");
  return Dataset(d, std::move(features), std::move(labels));
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw FormatError("failed writing " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_params(const std::filesystem::path& path, const SparseParams& params) {
  write_json(path, to_json(params));
}

SparseParams read_params(const std::filesystem::path& path) { return params_from_json(read_json(path)); }

}  // namespace sparsepac
