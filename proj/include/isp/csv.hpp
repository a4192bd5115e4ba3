#pragma once

// Plain-text CSV for spectra, boundary data, sampled sources,
// reconstructions and sweep results. Reals are written with %.17g so that
// parse followed by re-emit is byte-identical.

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "isp/errors.hpp"
#include "isp/experiments.hpp"
#include "isp/forward_model.hpp"
#include "isp/singular_system.hpp"
#include "isp/tsvd.hpp"

namespace isp::csv {

class ParseError : public Error {
 public:
  using Error::Error;
};

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double to_double(const std::string& s) {
  const char* b = s.c_str();
  char* e = nullptr;
  const double v = std::strtod(b, &e);
  if (e == b || *e != '\0') throw ParseError("csv: not a number: '" + s + "'");
  return v;
}

inline int to_int(const std::string& s) {
  const char* b = s.c_str();
  char* e = nullptr;
  const long v = std::strtol(b, &e, 10);
  if (e == b || *e != '\0') throw ParseError("csv: not an integer: '" + s + "'");
  return static_cast<int>(v);
}

// "# a=1,b=2" -> {a: "1", b: "2"}
inline std::map<std::string, std::string> parse_meta(const std::string& line) {
  if (line.rfind("# ", 0) != 0) throw ParseError("csv: expected metadata line, got '" + line + "'");
  std::map<std::string, std::string> out;
  for (const auto& kv : split(line.substr(2))) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("csv: bad metadata entry '" + kv + "'");
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

inline const std::string& need(const std::map<std::string, std::string>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw ParseError("csv: missing metadata key '" + key + "'");
  return it->second;
}

inline std::string read_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(std::string("csv: unexpected end of input reading ") + what);
  return line;
}

inline void expect_header(std::istream& in, const std::string& header) {
  const std::string line = read_line(in, "header");
  if (line != header) throw ParseError("csv: expected header '" + header + "', got '" + line + "'");
}

inline void write_source_body(std::ostream& out, const SourceField& s) {
  const auto& g = s.geometry();
  const auto& grid = s.grid();
  out << "# k=" << num(g.k()) << ",R0=" << num(g.r0()) << ",R=" << num(g.r()) << ",N_r=" << grid.n_r()
      << ",N_theta=" << grid.n_theta() << "\n";
  out << "i_r,i_theta,rho,theta,re,im\n";
  for (int i = 0; i < grid.n_r(); ++i)
    for (int l = 0; l < grid.n_theta(); ++l)
      out << i << ',' << l << ',' << num(grid.rho(i)) << ',' << num(grid.theta(l)) << ',' << num(s.at(i, l).real())
          << ',' << num(s.at(i, l).imag()) << "\n";
}

inline SourceField read_source_body(std::istream& in, const std::map<std::string, std::string>& meta) {
  const ProblemGeometry g(to_double(need(meta, "k")), to_double(need(meta, "R0")), to_double(need(meta, "R")));
  PolarGrid grid(g, to_int(need(meta, "N_r")), to_int(need(meta, "N_theta")));
  expect_header(in, "i_r,i_theta,rho,theta,re,im");
  SourceField s(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto f = split(read_line(in, "source rows"));
    if (f.size() != 6) throw ParseError("csv: source row needs 6 fields");
    const int i = to_int(f[0]);
    const int l = to_int(f[1]);
    if (i < 0 || i >= grid.n_r() || l < 0 || l >= grid.n_theta()) throw ParseError("csv: source index out of range");
    s.at(i, l) = cplx(to_double(f[4]), to_double(f[5]));
  }
  return s;
}

}  // namespace detail

inline void write_spectrum(std::ostream& out, const SpectrumTable& t) {
  out << "m,A_m,log10_abs_H2,log10_sigma,sigma\n";
  for (const auto& r : t.rows())
    out << r.m << ',' << num(r.a) << ',' << num(r.log_abs_h2 / std::numbers::ln10) << ','
        << num(r.log_sigma / std::numbers::ln10) << ',' << num(r.sigma) << "\n";
}

struct SpectrumCsvRow {
  int m = 0;
  double a = 0.0;
  double log10_abs_h2 = 0.0;
  double log10_sigma = 0.0;
  double sigma = 0.0;
};

inline std::vector<SpectrumCsvRow> read_spectrum(std::istream& in) {
  detail::expect_header(in, "m,A_m,log10_abs_H2,log10_sigma,sigma");
  std::vector<SpectrumCsvRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 5) throw ParseError("csv: spectrum row needs 5 fields");
    rows.push_back({detail::to_int(f[0]), detail::to_double(f[1]), detail::to_double(f[2]), detail::to_double(f[3]),
                    detail::to_double(f[4])});
  }
  return rows;
}

inline void write_spectrum_rows(std::ostream& out, const std::vector<SpectrumCsvRow>& rows) {
  out << "m,A_m,log10_abs_H2,log10_sigma,sigma\n";
  for (const auto& r : rows)
    out << r.m << ',' << num(r.a) << ',' << num(r.log10_abs_h2) << ',' << num(r.log10_sigma) << ',' << num(r.sigma)
        << "\n";
}

inline void write_boundary(std::ostream& out, const BoundaryData& b) {
  const auto& g = b.geometry;
  out << "# k=" << num(g.k()) << ",R0=" << num(g.r0()) << ",R=" << num(g.r()) << ",N_s=" << b.size()
      << ",noise_level=" << num(b.noise_level) << "\n";
  out << "index,re,im\n";
  for (int j = 0; j < b.size(); ++j) out << j << ',' << num(b.values[j].real()) << ',' << num(b.values[j].imag()) << "\n";
}

inline BoundaryData read_boundary(std::istream& in) {
  const auto meta = detail::parse_meta(detail::read_line(in, "metadata"));
  const ProblemGeometry g(detail::to_double(detail::need(meta, "k")), detail::to_double(detail::need(meta, "R0")),
                          detail::to_double(detail::need(meta, "R")));
  const int n = detail::to_int(detail::need(meta, "N_s"));
  if (n < 1) throw ParseError("csv: N_s must be positive");
  BoundaryData b{g, std::vector<cplx>(static_cast<std::size_t>(n)),
                 detail::to_double(detail::need(meta, "noise_level"))};
  detail::expect_header(in, "index,re,im");
  for (int j = 0; j < n; ++j) {
    const auto f = detail::split(detail::read_line(in, "boundary rows"));
    if (f.size() != 3) throw ParseError("csv: boundary row needs 3 fields");
    const int idx = detail::to_int(f[0]);
    if (idx < 0 || idx >= n) throw ParseError("csv: boundary index out of range");
    b.values[idx] = cplx(detail::to_double(f[1]), detail::to_double(f[2]));
  }
  return b;
}

inline void write_source(std::ostream& out, const SourceField& s) { detail::write_source_body(out, s); }

inline SourceField read_source(std::istream& in) {
  return detail::read_source_body(in, detail::parse_meta(detail::read_line(in, "metadata")));
}

inline void write_reconstruction(std::ostream& out, const Reconstruction& r) {
  out << "# N=" << r.truncation << ",residual=" << num(r.residual) << ",policy=" << to_string(r.policy) << "\n";
  detail::write_source_body(out, r.source);
}

inline Reconstruction read_reconstruction(std::istream& in) {
  const auto head = detail::parse_meta(detail::read_line(in, "reconstruction metadata"));
  const std::string& p = detail::need(head, "policy");
  TruncationPolicy policy;
  if (p == "B") policy = TruncationPolicy::bandwidth;
  else if (p == "B-") policy = TruncationPolicy::lower;
  else if (p == "B+") policy = TruncationPolicy::upper;
  else if (p == "N") policy = TruncationPolicy::manual;
  else throw ParseError("csv: unknown policy '" + p + "'");
  SourceField s = detail::read_source_body(in, detail::parse_meta(detail::read_line(in, "metadata")));
  return Reconstruction{std::move(s), detail::to_int(detail::need(head, "N")),
                        detail::to_double(detail::need(head, "residual")), policy};
}

inline constexpr const char* sweep_header =
    "kappa,kappa0,B,B_minus,B_plus,B_tilde_minus,B_tilde_plus,eps_minus,eps_plus,relerr_minus,relerr_plus";

inline void write_sweep(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << sweep_header << "\n";
  for (const auto& r : records)
    out << num(r.kappa) << ',' << num(r.kappa0) << ',' << r.b << ',' << r.b_minus << ',' << r.b_plus << ','
        << r.b_tilde_minus << ',' << r.b_tilde_plus << ',' << r.eps_minus << ',' << r.eps_plus << ','
        << num(r.relerr_minus) << ',' << num(r.relerr_plus) << "\n";
}

inline std::vector<SweepRecord> read_sweep(std::istream& in) {
  detail::expect_header(in, sweep_header);
  std::vector<SweepRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 11) throw ParseError("csv: sweep row needs 11 fields");
    SweepRecord r;
    r.kappa = detail::to_double(f[0]);
    r.kappa0 = detail::to_double(f[1]);
    r.b = detail::to_int(f[2]);
    r.b_minus = detail::to_int(f[3]);
    r.b_plus = detail::to_int(f[4]);
    r.b_tilde_minus = detail::to_int(f[5]);
    r.b_tilde_plus = detail::to_int(f[6]);
    r.eps_minus = detail::to_int(f[7]);
    r.eps_plus = detail::to_int(f[8]);
    r.relerr_minus = detail::to_double(f[9]);
    r.relerr_plus = detail::to_double(f[10]);
    out.push_back(r);
  }
  return out;
}

inline void write_fits(std::ostream& out, const std::vector<RegressionFit>& fits) {
  out << "target,slope,intercept,mean_abs_error,std_dev\n";
  for (const auto& f : fits)
    out << to_string(f.target) << ',' << num(f.slope) << ',' << num(f.intercept) << ',' << num(f.mean_abs_error)
        << ',' << num(f.std_dev) << "\n";
}

inline std::vector<RegressionFit> read_fits(std::istream& in) {
  detail::expect_header(in, "target,slope,intercept,mean_abs_error,std_dev");
  std::vector<RegressionFit> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 5) throw ParseError("csv: fit row needs 5 fields");
    RegressionFit r;
    if (f[0] == "B") r.target = FitTarget::b;
    else if (f[0] == "B_minus") r.target = FitTarget::b_minus;
    else if (f[0] == "B_plus") r.target = FitTarget::b_plus;
    else throw ParseError("csv: unknown fit target '" + f[0] + "'");
    r.slope = detail::to_double(f[1]);
    r.intercept = detail::to_double(f[2]);
    r.mean_abs_error = detail::to_double(f[3]);
    r.std_dev = detail::to_double(f[4]);
    out.push_back(r);
  }
  return out;
}

}  // namespace isp::csv
