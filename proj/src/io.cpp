#include "ddim/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ddim {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string points_csv(const PointSet& a) {
  std::string label = a.label();
  std::replace(label.begin(), label.end(), '\n', ' ');
  std::string out = "# dim=" + std::to_string(a.dim()) + " n=" + std::to_string(a.size()) + " label=" + label + "\n";
  const PointMatrix& p = a.points();
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index k = 0; k < p.cols(); ++k) {
      if (k) out += ',';
      out += format_double(p(i, k));
    }
    out += '\n';
  }
  return out;
}

namespace {

[[noreturn]] void bad_csv(const std::string& source, std::size_t line, const std::string& what) {
  throw InvalidInput(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

PointSet parse_points_csv(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) bad_csv(source, 1, "empty file");
  int dim = 0;
  long long n = -1;
  std::string label;
  {
    if (line.rfind("# dim=", 0) != 0) bad_csv(source, 1, "expected header '# dim=<d> n=<N> label=<text>'");
    const auto n_pos = line.find(" n=");
    const auto l_pos = line.find(" label=");
    if (n_pos == std::string::npos || l_pos == std::string::npos || l_pos < n_pos) {
      bad_csv(source, 1, "malformed header");
    }
    try {
      dim = std::stoi(line.substr(6, n_pos - 6));
      n = std::stoll(line.substr(n_pos + 3, l_pos - n_pos - 3));
    } catch (const std::exception&) {
      bad_csv(source, 1, "malformed dim or n in header");
    }
    label = line.substr(l_pos + 7);
    if (dim < 1 || n < 1) bad_csv(source, 1, "dim and n must be positive");
  }
  PointMatrix p(n, dim);
  std::size_t lineno = 1;
  Index row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (row >= n) bad_csv(source, lineno, "more points than declared in the header");
    const char* s = line.c_str();
    for (int k = 0; k < dim; ++k) {
      char* end = nullptr;
      const double v = std::strtod(s, &end);
      if (end == s) bad_csv(source, lineno, "expected a number");
      if (!std::isfinite(v)) bad_csv(source, lineno, "non-finite coordinate");
      p(row, k) = v;
      s = end;
      if (k + 1 < dim) {
        if (*s != ',') bad_csv(source, lineno, "expected " + std::to_string(dim) + " comma-separated coordinates");
        ++s;
      }
    }
    while (*s == ' ' || *s == '\r') ++s;
    if (*s != '\0') bad_csv(source, lineno, "trailing characters");
    ++row;
  }
  if (row != n) bad_csv(source, lineno, "declared n=" + std::to_string(n) + " but read " + std::to_string(row));
  return PointSet(std::move(p), label);
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& file, std::string_view content) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + file.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InvalidInput("write failed for " + file.string());
}

void save_points_csv(const PointSet& a, const fs::path& file) { write_file(file, points_csv(a)); }

PointSet load_points_csv(const fs::path& file) { return parse_points_csv(read_file(file), file.string()); }

namespace {

std::string digest_hex(const EVP_MD* md, std::string_view prefix, std::string_view data) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestInit_ex(ctx, md, nullptr);
  EVP_DigestUpdate(ctx, prefix.data(), prefix.size());
  EVP_DigestUpdate(ctx, data.data(), data.size());
  EVP_DigestFinal_ex(ctx, out, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[out[i] >> 4];
    s += hex[out[i] & 15];
  }
  return s;
}

}  // namespace

std::string sha256_hex(std::string_view data) { return digest_hex(EVP_sha256(), {}, data); }

std::string git_blob_hash(std::string_view data) {
  const std::string header = "blob " + std::to_string(data.size());
  return digest_hex(EVP_sha1(), std::string_view(header.c_str(), header.size() + 1), data);
}

json family_manifest(const SetFamily& f) {
  json j;
  j["generator_id"] = f.generator_id;
  j["params"] = f.params;
  j["growth_variable"] = f.growth_variable;
  j["growth_values"] = f.growth_values;
  json sizes = json::array(), files = json::array(), hashes = json::array();
  for (std::size_t i = 0; i < f.members.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "member_%03zu.csv", i);
    sizes.push_back(f.members[i].size());
    files.push_back(name);
    hashes.push_back(git_blob_hash(points_csv(f.members[i])));
  }
  j["sizes"] = sizes;
  j["files"] = files;
  j["hashes"] = hashes;
  return j;
}

void save_family(const SetFamily& f, const fs::path& dir) {
  const json manifest = family_manifest(f);
  for (std::size_t i = 0; i < f.members.size(); ++i) {
    save_points_csv(f.members[i], dir / manifest["files"][i].get<std::string>());
  }
  write_file(dir / "family.json", manifest.dump(2) + "\n");
}

SetFamily load_family(const fs::path& dir) {
  json j;
  try {
    j = json::parse(read_file(dir / "family.json"));
  } catch (const json::exception& e) {
    throw InvalidInput((dir / "family.json").string() + ": " + e.what());
  }
  SetFamily f;
  try {
    f.generator_id = j.at("generator_id").get<std::string>();
    f.params = j.value("params", json::object());
    f.growth_variable = j.value("growth_variable", std::string("N"));
    const auto files = j.at("files").get<std::vector<std::string>>();
    for (const auto& name : files) f.members.push_back(load_points_csv(dir / name));
    if (j.contains("growth_values")) {
      f.growth_values = j.at("growth_values").get<std::vector<double>>();
    } else {
      for (const auto& m : f.members) f.growth_values.push_back(static_cast<double>(m.size()));
    }
    if (j.contains("sizes")) {
      const auto sizes = j.at("sizes").get<std::vector<Index>>();
      if (sizes != f.sizes()) throw InvalidInput("family.json sizes disagree with the member files");
    }
  } catch (const json::exception& e) {
    throw InvalidInput((dir / "family.json").string() + ": " + e.what());
  }
  f.validate();
  return f;
}

SetFamily load_family_or_points(const fs::path& path) {
  if (fs::is_directory(path)) return load_family(path);
  SetFamily f;
  f.generator_id = "file";
  f.params = {{"path", path.string()}};
  f.members.push_back(load_points_csv(path));
  f.growth_values.push_back(static_cast<double>(f.members.back().size()));
  return f;
}

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string energy_table_csv(const SetFamily& f, const std::vector<EnergyReport>& rows) {
  std::string out = "N,growth,beta,raw_sum,normalized,scale_invariant_ratio,diameter,input_hash,generator,params\n";
  const std::string params = csv_quote(f.params.dump());
  std::size_t member = 0;
  std::string hash;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    while (member < f.members.size() && f.members[member].size() != rows[r].n) ++member;
    if (member == f.members.size()) throw InvalidInput("energy table: row does not match a family member");
    if (r == 0 || rows[r - 1].n != rows[r].n) hash = git_blob_hash(points_csv(f.members[member]));
    const EnergyReport& e = rows[r];
    out += std::to_string(e.n) + ',' + format_double(f.growth_values[member]) + ',' + format_double(e.beta) + ',' +
           format_double(e.raw_sum) + ',' + format_double(e.normalized) + ',' + format_double(e.scale_invariant_ratio) +
           ',' + format_double(e.diameter) + ',' + hash + ',' + csv_quote(f.generator_id) + ',' + params + '\n';
  }
  return out;
}

json to_json(const LineFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"stderr", fit.stderr_slope}, {"r2", fit.r2}, {"n", fit.n}};
}

json to_json(const AdaptabilityVerdict& v) {
  json energy = json::array();
  for (const auto& e : v.energy_fits) {
    energy.push_back({{"beta", e.beta}, {"slope", e.fit.slope}, {"stderr", e.fit.stderr_slope}, {"r2", e.fit.r2}, {"ok", e.ok}});
  }
  return {{"kind", v.kind},
          {"alpha", v.alpha},
          {"tol", v.tol},
          {"slack", v.slack},
          {"diam", {{"slope", v.diam_fit.slope},
                    {"stderr", v.diam_fit.stderr_slope},
                    {"r2", v.diam_fit.r2},
                    {"bound", 1.0 / v.alpha + v.tol},
                    {"local_slopes", v.diam_local_slopes},
                    {"diverging", v.diam_diverging},
                    {"ok", v.diam_condition_ok}}},
          {"energy_checked", v.energy_checked},
          {"energy", energy},
          {"energy_ok", v.energy_condition_ok},
          {"ok", v.ok}};
}

json to_json(const DimensionEstimate& e) {
  json strategies = json::array();
  for (const auto& s : e.strategies) {
    json verdicts = json::array();
    for (const auto& v : s.verdicts) verdicts.push_back({{"alpha", v.alpha}, {"ok", v.ok}});
    strategies.push_back({{"strategy", s.name},
                          {"eps", s.eps},
                          {"accepted", s.accepted},
                          {"reason", s.reason},
                          {"size_slope", s.size_fit.slope},
                          {"best_alpha", s.best_alpha},
                          {"verdicts", verdicts}});
  }
  return {{"kind", e.kind},
          {"value", e.value},
          {"strategy", e.strategy_used},
          {"lower_bound", e.lower_bound},
          {"alpha_grid", e.alpha_grid},
          {"strategies", strategies}};
}

json to_json(const BoxCountReport& r) {
  return {{"deltas", r.deltas},
          {"counts", r.counts},
          {"fitted_dimension", r.fitted_dimension},
          {"stderr", r.fit.stderr_slope},
          {"r2", r.fit.r2},
          {"ci_level", r.level},
          {"ci", {r.ci_low, r.ci_high}}};
}

json to_json(const DistanceSummary& s) {
  return {{"n_points", s.n_points},         {"tau", s.tau},
          {"distinct_count", s.distinct_count}, {"min_distance", s.min_distance},
          {"max_distance", s.max_distance}, {"method", s.method}};
}

json to_json(const FeketeResult& r) {
  return {{"domain", r.domain},         {"alpha", r.alpha},         {"n", r.configuration.size()},
          {"f_alpha", r.f_alpha},       {"d_n_alpha", r.d_n_alpha}, {"converged", r.converged},
          {"iterations", r.iterations}, {"restarts", r.restarts},   {"best_restart", r.best_restart},
          {"optimizer", r.optimizer}};
}

json to_json(const TransfiniteCurve& c) {
  json entries = json::array();
  for (const auto& e : c.entries) {
    entries.push_back({{"n", e.n},
                       {"f_alpha", e.f_alpha},
                       {"d_n", e.d_n},
                       {"converged", e.converged},
                       {"monotonicity_violation", e.monotonicity_violation}});
  }
  return {{"entries", entries},
          {"capacity_estimate", c.capacity_estimate},
          {"richardson_estimate", c.richardson_estimate},
          {"violations", c.violations}};
}

json to_json(const EnergyReport& r) {
  return {{"n", r.n},
          {"beta", r.beta},
          {"raw_sum", r.raw_sum},
          {"normalized", r.normalized},
          {"scale_invariant_ratio", r.scale_invariant_ratio},
          {"diameter", r.diameter}};
}

}  // namespace ddim
