#include "muskat/error.hpp"
#include "muskat/experiments.hpp"

#include <openssl/evp.h>

#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace muskat {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

} // namespace

void emit_snapshot(const Snapshot& s, const fs::path& path) {
  if (s.backend == Backend::realline && s.nodes.size() != s.values.size())
    throw InputError("snapshot: realline snapshot needs one node per value");
  auto out = open_out(path);
  out << "# muskatlab snapshot 1\n";
  out << "backend " << to_string(s.backend) << '\n';
  out << "label " << s.label << '\n';
  out << "n " << s.values.size() << '\n';
  out << "t " << fmt(s.t) << '\n';
  if (s.backend == Backend::realline) out << "half_width " << fmt(s.half_width) << '\n';
  out << "values\n";
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    if (s.backend == Backend::realline) out << fmt(s.nodes[j]) << ' ';
    out << fmt(s.values[j]) << '\n';
  }
  if (!out) throw InputError("snapshot: write to '" + path.string() + "' failed");
}

Snapshot load_snapshot(const fs::path& path, std::optional<Backend> expected) {
  std::ifstream in(path);
  if (!in) throw InputError("snapshot: cannot open '" + path.string() + "'");
  Snapshot s;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError("snapshot '" + path.string() + "' line " + std::to_string(lineno) + ": " + what, lineno);
  };
  if (!std::getline(in, line)) {
    lineno = 1;
    throw fail("empty file");
  }
  ++lineno;
  if (line != "# muskatlab snapshot 1") throw fail("missing snapshot header");

  std::optional<std::size_t> n;
  bool have_backend = false, have_t = false, have_hw = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line == "values") break;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw fail("expected 'key value'");
    const std::string key = line.substr(0, sp), val = line.substr(sp + 1);
    if (key == "backend") {
      if (val == "spectral") s.backend = Backend::spectral;
      else if (val == "realline") s.backend = Backend::realline;
      else throw fail("unknown backend '" + val + "'");
      have_backend = true;
    } else if (key == "label") {
      s.label = val;
    } else if (key == "n") {
      double d;
      if (!parse_double(val, d) || d < 1 || d != std::floor(d)) throw fail("bad node count");
      n = static_cast<std::size_t>(d);
    } else if (key == "t") {
      if (!parse_double(val, s.t)) throw fail("bad time");
      have_t = true;
    } else if (key == "half_width") {
      if (!parse_double(val, s.half_width)) throw fail("bad half width");
      have_hw = true;
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  if (line != "values") throw fail("missing 'values' section");
  if (!have_backend || !n || !have_t) throw fail("header lacks backend, n or t");
  if (s.backend == Backend::realline && !have_hw) throw fail("realline snapshot lacks half_width");
  if (expected && *expected != s.backend)
    throw InputError("snapshot '" + path.string() + "' was written by the " + to_string(s.backend) +
                     " backend, expected " + to_string(*expected));

  s.values.reserve(*n);
  while (s.values.size() < *n && std::getline(in, line)) {
    ++lineno;
    const auto cells = split(line, ' ');
    double x = 0.0, v = 0.0;
    if (s.backend == Backend::realline) {
      if (cells.size() != 2 || !parse_double(cells[0], x) || !parse_double(cells[1], v))
        throw fail("expected 'node value'");
      s.nodes.push_back(x);
    } else if (cells.size() != 1 || !parse_double(cells[0], v)) {
      throw fail("expected one value");
    }
    s.values.push_back(v);
  }
  if (s.values.size() != *n) {
    ++lineno;
    throw fail("expected " + std::to_string(*n) + " values, found " + std::to_string(s.values.size()));
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty()) throw fail("trailing content");
  }
  return s;
}

void write_records_csv(const std::vector<DiagnosticsRecord>& rows, const fs::path& path) {
  auto out = open_out(path);
  const auto cols = record_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c].name;
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << fmt(r.*(cols[c].member));
    out << '\n';
  }
}

std::vector<DiagnosticsRecord> read_records_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("diagnostics CSV '" + path.string() + "' is empty", 1);
  const auto header = split(line, ',');
  const auto cols = record_columns();
  std::vector<double DiagnosticsRecord::*> members;
  for (const auto& h : header) {
    double DiagnosticsRecord::*m = nullptr;
    for (const auto& c : cols)
      if (h == c.name) m = c.member;
    if (!m) throw ParseError("diagnostics CSV: unknown column '" + h + "'", 1);
    members.push_back(m);
  }
  std::vector<DiagnosticsRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != members.size())
      throw ParseError("diagnostics CSV line " + std::to_string(lineno) + ": wrong number of fields", lineno);
    DiagnosticsRecord r;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v;
      if (!parse_double(cells[c], v))
        throw ParseError("diagnostics CSV line " + std::to_string(lineno) + ": bad number '" + cells[c] + "'",
                         lineno);
      r.*(members[c]) = v;
    }
    rows.push_back(r);
  }
  return rows;
}

void write_checks_csv(const std::vector<BoundCheck>& rows, const fs::path& path) {
  auto out = open_out(path);
  out << "name,t,measured,bound,satisfied,slack,applicable\n";
  for (const auto& c : rows)
    out << c.name << ',' << fmt(c.t) << ',' << fmt(c.measured) << ',' << fmt(c.bound) << ','
        << (c.satisfied ? 1 : 0) << ',' << fmt(c.slack) << ',' << (c.applicable ? 1 : 0) << '\n';
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

} // namespace muskat
