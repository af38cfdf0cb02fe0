#include "config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ulab::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown field '" + where + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where = "") {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + where + key + "': " + e.what());
  }
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.potential.size() < 2) throw ConfigError("potential needs at least two even coefficients");
  for (double v : c.potential)
    if (!std::isfinite(v)) throw ConfigError("potential coefficients must be finite");
  if (!(c.potential.back() > 0.0)) throw ConfigError("leading potential coefficient must be positive");
  if (!(c.d1 > 0.0) || !(c.d2 > 0.0)) throw ConfigError("domain d1, d2 must be positive");
  if (c.n_list.empty()) throw ConfigError("n_list must not be empty");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    if (c.n_list[i] < 2 || c.n_list[i] % 2 != 0) throw ConfigError("n_list entries must be even and >= 2");
    if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) throw ConfigError("n_list must be increasing");
  }
  if (c.s_points < 1 || !(c.s_hi >= c.s_lo)) throw ConfigError("invalid s_grid");
  if (c.panels < 0 || c.order < 2) throw ConfigError("invalid quadrature spec");
  const auto& t = c.tolerances;
  for (double v : {t.orthonormality, t.tail, t.factorization, t.resolvent_identity, t.spacing_tv})
    if (!(v > 0.0)) throw ConfigError("tolerances must be positive");
  if (c.sampler) {
    const auto& s = *c.sampler;
    if (s.betas.empty()) throw ConfigError("sampler.betas must not be empty");
    for (int b : s.betas)
      if (b != 1 && b != 2) throw ConfigError("sampler.betas entries must be 1 or 2");
    if (s.n < 2 || s.n > 128) throw ConfigError("sampler.n must lie in [2, 128]");
    if (s.samples < 1 || s.burn_in < 0 || s.thin < 0 || s.chains < 1) throw ConfigError("invalid sampler counts");
    if (!(s.half_window > 0.0)) throw ConfigError("sampler.half_window must be positive");
  }
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"command", "potential", "domain", "n_list", "lambda0_list", "s_grid", "quadrature", "tolerances",
                     "seed", "sampler", "output"},
                 "");
  for (const char* key : {"potential", "n_list"})
    if (!j.contains(key)) throw ConfigError(std::string("missing required field '") + key + "'");

  RunConfig c;
  read(j, "command", c.command);
  read(j, "potential", c.potential);
  read(j, "n_list", c.n_list);
  read(j, "lambda0_list", c.lambda0_list);
  read(j, "seed", c.seed);
  read(j, "output", c.output);
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    reject_unknown(d, {"d1", "d2"}, "domain.");
    read(d, "d1", c.d1, "domain.");
    read(d, "d2", c.d2, "domain.");
  }
  if (j.contains("s_grid")) {
    const auto& s = j.at("s_grid");
    reject_unknown(s, {"lo", "hi", "points"}, "s_grid.");
    read(s, "lo", c.s_lo, "s_grid.");
    read(s, "hi", c.s_hi, "s_grid.");
    read(s, "points", c.s_points, "s_grid.");
  }
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    reject_unknown(q, {"panels", "order"}, "quadrature.");
    read(q, "panels", c.panels, "quadrature.");
    read(q, "order", c.order, "quadrature.");
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    reject_unknown(t, {"orthonormality", "tail", "factorization", "resolvent_identity", "spacing_tv"}, "tolerances.");
    read(t, "orthonormality", c.tolerances.orthonormality, "tolerances.");
    read(t, "tail", c.tolerances.tail, "tolerances.");
    read(t, "factorization", c.tolerances.factorization, "tolerances.");
    read(t, "resolvent_identity", c.tolerances.resolvent_identity, "tolerances.");
    read(t, "spacing_tv", c.tolerances.spacing_tv, "tolerances.");
  }
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    reject_unknown(s, {"betas", "n", "samples", "burn_in", "thin", "chains", "lambda0", "half_window"}, "sampler.");
    SamplerConfig sc;
    read(s, "betas", sc.betas, "sampler.");
    read(s, "n", sc.n, "sampler.");
    read(s, "samples", sc.samples, "sampler.");
    read(s, "burn_in", sc.burn_in, "sampler.");
    read(s, "thin", sc.thin, "sampler.");
    read(s, "chains", sc.chains, "sampler.");
    read(s, "lambda0", sc.lambda0, "sampler.");
    read(s, "half_window", sc.half_window, "sampler.");
    c.sampler = sc;
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["potential"] = c.potential;
  j["domain"] = {{"d1", c.d1}, {"d2", c.d2}};
  j["n_list"] = c.n_list;
  j["lambda0_list"] = c.lambda0_list;
  j["s_grid"] = {{"lo", c.s_lo}, {"hi", c.s_hi}, {"points", c.s_points}};
  j["quadrature"] = {{"panels", c.panels}, {"order", c.order}};
  const auto& t = c.tolerances;
  j["tolerances"] = {{"orthonormality", t.orthonormality}, {"tail", t.tail}, {"factorization", t.factorization},
                     {"resolvent_identity", t.resolvent_identity}, {"spacing_tv", t.spacing_tv}};
  j["seed"] = c.seed;
  if (c.sampler) {
    const auto& s = *c.sampler;
    j["sampler"] = {{"betas", s.betas}, {"n", s.n}, {"samples", s.samples}, {"burn_in", s.burn_in},
                    {"thin", s.thin}, {"chains", s.chains}, {"lambda0", s.lambda0}, {"half_window", s.half_window}};
  }
  j["output"] = c.output;
  return j;
}

nlohmann::json hashed_json(const RunConfig& c) {
  auto j = to_json(c);
  j.erase("output");
  return j;
}

std::string config_hash(const RunConfig& c) {
  const std::string text = hashed_json(c).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

}  // namespace ulab::cli
