// Command-line front end: spectrum, bandwidth, sweep, reconstruct.
//
// Exit codes: 0 ok, 2 usage or invalid input, 3 horizon too short,
// 4 numeric failure, 1 anything else (I/O).

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isp/isp.hpp"

namespace {

using isp::cplx;

constexpr int exit_usage = 2;
constexpr int exit_horizon = 3;
constexpr int exit_numeric = 4;

struct GeometryFlags {
  std::optional<double> kappa, kappa0, k, r0, r;

  void add(CLI::App* app) {
    app->add_option("--kappa", kappa, "measurement size parameter kR (with --kappa0, R = 1)");
    app->add_option("--kappa0", kappa0, "source size parameter kR0");
    app->add_option("--k", k, "wavenumber");
    app->add_option("--r0", r0, "source disk radius");
    app->add_option("--r", r, "measurement circle radius");
  }

  isp::ProblemGeometry resolve() const {
    const bool size = kappa || kappa0;
    const bool phys = k || r0 || r;
    if (size && phys) throw isp::DomainError("give either --kappa/--kappa0 or --k/--r0/--r, not both");
    if (size) {
      if (!kappa || !kappa0) throw isp::DomainError("--kappa and --kappa0 must be given together");
      return isp::ProblemGeometry::from_size_parameters(*kappa0, *kappa);
    }
    if (phys) {
      if (!k || !r0 || !r) throw isp::DomainError("--k, --r0 and --r must be given together");
      return isp::ProblemGeometry(*k, *r0, *r);
    }
    throw isp::DomainError("geometry required: --kappa --kappa0 or --k --r0 --r");
  }
};

// Output stream for PATH, or stdout when PATH is empty or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& get() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// "(a+bi)", "0.5i", "-2", "1e-3"
cplx parse_coefficient(std::string s) {
  if (s.empty()) return 1.0;
  auto real_or_imag = [](const std::string& t) -> cplx {
    std::size_t used = 0;
    if (!t.empty() && t.back() == 'i') {
      const std::string body = t.substr(0, t.size() - 1);
      if (body.empty() || body == "+") return {0.0, 1.0};
      if (body == "-") return {0.0, -1.0};
      const double v = std::stod(body, &used);
      if (used != body.size()) throw isp::DomainError("bad coefficient '" + t + "'");
      return {0.0, v};
    }
    const double v = std::stod(t, &used);
    if (used != t.size()) throw isp::DomainError("bad coefficient '" + t + "'");
    return {v, 0.0};
  };
  try {
    if (s.front() == '(' && s.back() == ')') {
      s = s.substr(1, s.size() - 2);
      // split at the last sign that is not an exponent sign
      for (std::size_t p = s.size(); p-- > 1;) {
        if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E')
          return real_or_imag(s.substr(0, p)) + real_or_imag(s.substr(p));
      }
    }
    return real_or_imag(s);
  } catch (const std::logic_error&) {
    throw isp::DomainError("bad coefficient '" + s + "'");
  }
}

// "mode:2+0.5i*mode:-9+(1-2i)*mode:0"
std::vector<std::pair<int, cplx>> parse_source(const std::string& spec) {
  std::vector<std::string> terms;
  std::string cur;
  int depth = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const char c = spec[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    const bool exponent = i > 0 && (spec[i - 1] == 'e' || spec[i - 1] == 'E');
    const bool after_colon = i > 0 && spec[i - 1] == ':';
    if (c == '+' && depth == 0 && !exponent && !after_colon) {
      terms.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  terms.push_back(cur);

  std::vector<std::pair<int, cplx>> out;
  for (const auto& t : terms) {
    const auto at = t.find("mode:");
    if (at == std::string::npos) throw isp::DomainError("source term '" + t + "' lacks 'mode:<m>'");
    std::string coeff = t.substr(0, at);
    if (!coeff.empty()) {
      if (coeff.back() != '*') throw isp::DomainError("source term '" + t + "': expected '<coef>*mode:<m>'");
      coeff.pop_back();
    }
    const std::string idx = t.substr(at + 5);
    std::size_t used = 0;
    int m = 0;
    try {
      m = std::stoi(idx, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != idx.size()) throw isp::DomainError("source term '" + t + "': bad mode index");
    out.emplace_back(m, parse_coefficient(coeff));
  }
  return out;
}

isp::TruncationPolicy parse_policy(const std::string& p) {
  if (p == "B") return isp::TruncationPolicy::bandwidth;
  if (p == "B-") return isp::TruncationPolicy::lower;
  if (p == "B+") return isp::TruncationPolicy::upper;
  if (p == "N") return isp::TruncationPolicy::manual;
  throw isp::DomainError("unknown policy '" + p + "'");
}

using isp::csv::num;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular system, bandwidth and TSVD inversion for the 2-D Helmholtz source problem"};
  app.require_subcommand(1);

  // spectrum
  GeometryFlags spec_geo;
  std::optional<int> spec_mmax;
  std::string spec_out;
  auto* spectrum = app.add_subcommand("spectrum", "write sigma_m and its factors as CSV");
  spec_geo.add(spectrum);
  spectrum->add_option("--mmax", spec_mmax, "largest order (default ceil(k0) + ceil(3 k0^(1/3)) + 40)");
  spectrum->add_option("--out", spec_out, "output CSV (default stdout)");

  // bandwidth
  GeometryFlags bw_geo;
  std::optional<int> bw_mmax;
  std::string bw_format = "csv", bw_out;
  auto* bandwidth = app.add_subcommand("bandwidth", "bandwidth, its bounds and the angular sampling step");
  bw_geo.add(bandwidth);
  bandwidth->add_option("--mmax", bw_mmax, "spectrum horizon");
  bandwidth->add_option("--format", bw_format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
  bandwidth->add_option("--out", bw_out, "also write the report as CSV");

  // sweep
  int sw_n = 300;
  double sw_lo = 2.0, sw_hi = 100.0 * std::numbers::pi, sw_ratio = 1.0;
  std::string sw_out = ".";
  auto* sweep = app.add_subcommand("sweep", "bandwidth sweep over kappa0 with linear fits");
  sweep->add_option("--n", sw_n, "number of grid points")->check(CLI::Range(2, 1000000));
  sweep->add_option("--kmin", sw_lo, "first kappa0");
  sweep->add_option("--kmax", sw_hi, "last kappa0");
  sweep->add_option("--ratio", sw_ratio, "R / R0 (kappa = ratio * kappa0)");
  sweep->add_option("--out", sw_out, "output directory for sweep.csv and fits.csv");

  // reconstruct
  GeometryFlags rc_geo;
  std::string rc_source, rc_data, rc_policy = "B", rc_out;
  double rc_noise = 0.0;
  std::uint64_t rc_seed = 1;
  std::optional<int> rc_n, rc_mmax;
  int rc_nr = 64;
  std::optional<int> rc_ntheta, rc_ns;
  auto* reconstruct = app.add_subcommand("reconstruct", "TSVD reconstruction from boundary data");
  rc_geo.add(reconstruct);
  auto* src_opt = reconstruct->add_option("--source", rc_source, "built-in source, e.g. \"mode:2+0.5i*mode:-9\"");
  auto* data_opt = reconstruct->add_option("--data", rc_data, "boundary data CSV instead of a built-in source");
  src_opt->excludes(data_opt);
  reconstruct->add_option("--noise", rc_noise, "relative noise level")->check(CLI::NonNegativeNumber);
  reconstruct->add_option("--seed", rc_seed, "noise seed");
  reconstruct->add_option("--policy", rc_policy, "truncation policy")->check(CLI::IsMember({"B", "B-", "B+", "N"}));
  reconstruct->add_option("--N", rc_n, "truncation for --policy N");
  reconstruct->add_option("--mmax", rc_mmax, "modes used to synthesise and decompose data");
  reconstruct->add_option("--nr", rc_nr, "radial nodes")->check(CLI::PositiveNumber);
  reconstruct->add_option("--ntheta", rc_ntheta, "angular nodes");
  reconstruct->add_option("--ns", rc_ns, "boundary samples");
  reconstruct->add_option("--out", rc_out, "reconstruction CSV (default: none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  try {
    if (spectrum->parsed()) {
      const auto g = spec_geo.resolve();
      const auto table = isp::build_spectrum(g, spec_mmax.value_or(isp::default_horizon(g.kappa0())));
      Sink sink(spec_out);
      isp::csv::write_spectrum(sink.get(), table);
      return 0;
    }

    if (bandwidth->parsed()) {
      const auto g = bw_geo.resolve();
      const auto r = isp::report(g, bw_mmax.value_or(isp::default_horizon(g.kappa0())));
      std::optional<double> step;
      std::string step_note;
      try {
        step = isp::max_angular_sampling(g);
      } catch (const isp::DomainError& e) {
        step_note = e.what();
      }
      if (bw_format == "json") {
        nlohmann::json j = {{"kappa", g.kappa()},     {"kappa0", g.kappa0()},      {"B", r.bandwidth},
                            {"B_minus", r.lower},     {"B_plus", r.upper},         {"B_tilde_minus", r.lower_approx},
                            {"B_tilde_plus", r.upper_approx}, {"horizon", r.horizon}, {"upper_holds", r.upper_holds}};
        if (step) j["dtheta"] = *step;
        else j["dtheta_error"] = step_note;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "B=" << r.bandwidth << " B-=" << r.lower << " B+=" << r.upper << " B~-=" << r.lower_approx
                  << " B~+=" << r.upper_approx;
        if (step) std::cout << " dtheta=" << num(*step);
        std::cout << "\n";
        if (!step) std::cout << "dtheta: error: " << step_note << "\n";
        if (!r.upper_holds) std::cout << "warning: B exceeds the conjectured upper bound B+\n";
      }
      if (!bw_out.empty()) {
        Sink sink(bw_out);
        sink.get() << "kappa,kappa0,B,B_minus,B_plus,B_tilde_minus,B_tilde_plus,horizon,dtheta\n"
                   << num(g.kappa()) << ',' << num(g.kappa0()) << ',' << r.bandwidth << ',' << r.lower << ','
                   << r.upper << ',' << r.lower_approx << ',' << r.upper_approx << ',' << r.horizon << ','
                   << (step ? num(*step) : std::string("nan")) << "\n";
      }
      return 0;
    }

    if (sweep->parsed()) {
      const auto records = isp::run_sweep(sw_n, sw_lo, sw_hi, sw_ratio);
      std::vector<isp::RegressionFit> fits;
      for (auto t : {isp::FitTarget::b, isp::FitTarget::b_minus, isp::FitTarget::b_plus})
        fits.push_back(isp::fit_linear(records, t));
      std::filesystem::create_directories(sw_out);
      {
        Sink s((std::filesystem::path(sw_out) / "sweep.csv").string());
        isp::csv::write_sweep(s.get(), records);
      }
      {
        Sink s((std::filesystem::path(sw_out) / "fits.csv").string());
        isp::csv::write_fits(s.get(), fits);
      }
      double em = 0, ep = 0;
      int mm = 0, mp = 0, below = 0, above = 0;
      for (const auto& r : records) {
        em += r.eps_minus;
        ep += r.eps_plus;
        mm = std::max(mm, std::abs(r.eps_minus));
        mp = std::max(mp, std::abs(r.eps_plus));
        below += r.b_minus > r.b;
        above += r.b > r.b_plus;
      }
      const double n = static_cast<double>(records.size());
      std::cout << "points=" << records.size() << " mean_eps_minus=" << num(em / n) << " mean_eps_plus=" << num(ep / n)
                << " max_abs_eps_minus=" << mm << " max_abs_eps_plus=" << mp << " lower_violations=" << below
                << " upper_violations=" << above << "\n";
      for (const auto& r : records)
        if (r.b > r.b_plus) std::cout << "upper bound violated at kappa0=" << num(r.kappa0) << "\n";
      return 0;
    }

    if (reconstruct->parsed()) {
      if (rc_source.empty() && rc_data.empty()) throw isp::DomainError("reconstruct needs --source or --data");
      const auto policy = parse_policy(rc_policy);
      if (policy == isp::TruncationPolicy::manual && !rc_n) throw isp::DomainError("--policy N requires --N");

      std::optional<isp::BoundaryData> data;
      std::optional<isp::ProblemGeometry> g;
      if (!rc_data.empty()) {
        std::ifstream in(rc_data);
        if (!in) throw std::runtime_error("cannot read " + rc_data);
        data = isp::csv::read_boundary(in);
        g = data->geometry;
      } else {
        g = rc_geo.resolve();
      }

      const int n = isp::pick_truncation(*g, policy, rc_n.value_or(-1));
      const int mmax = rc_mmax.value_or(std::max(isp::default_horizon(g->kappa0()), n));
      if (n > mmax) throw isp::DomainError("truncation exceeds --mmax");
      const int ntheta = rc_ntheta.value_or(2 * mmax + 2);
      const isp::PolarGrid grid(*g, rc_nr, ntheta);

      std::optional<isp::SourceField> truth;
      if (!data) {
        truth = isp::sample_modes(grid, parse_source(rc_source));
        data = isp::synthesize_measurement(*truth, mmax, rc_ns.value_or(2 * mmax + 2), rc_noise, rc_seed);
      }
      const auto coeffs = isp::modal_decompose(*data, std::min(mmax, (data->size() - 1) / 2));
      const auto rec = isp::tsvd_reconstruct(coeffs, n, grid, policy);

      std::cout << "N=" << rec.truncation << " policy=" << isp::to_string(policy) << " residual=" << num(rec.residual);
      if (truth) std::cout << " relative_error=" << num(isp::relative_l2_error(rec.source, *truth));
      std::cout << "\n";
      if (!rc_out.empty()) {
        Sink sink(rc_out);
        isp::csv::write_reconstruction(sink.get(), rec);
      }
      return 0;
    }
  } catch (const isp::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const isp::HorizonError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_horizon;
  } catch (const isp::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const isp::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  } catch (const isp::csv::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
