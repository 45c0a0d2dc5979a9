// Command-line front end; uses only the C interface.
#include "CLI11.hpp"
#include "flattori.h"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kOk = 0, kVerifyFail = 1, kUsage = 2;

struct Tau {
  double re = 0, im = 0;
};

bool parse_tau(const std::string& s, Tau& t) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return false;
  try {
    std::size_t a = 0, b = 0;
    t.re = std::stod(s.substr(0, comma), &a);
    t.im = std::stod(s.substr(comma + 1), &b);
    return a == comma && b == s.size() - comma - 1;
  } catch (...) {
    return false;
  }
}

int fail(ft_status s) {
  std::cerr << "error: " << ft_status_name(s) << ": " << ft_last_error() << "\n";
  return s == FT_E_USAGE || s == FT_E_DOMAIN ? kUsage : kVerifyFail;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string complex_str(double re, double im) {
  if (std::abs(re) < 1e-9) return std::abs(im - 1) < 1e-15 ? "i" : fmt(im) + "i";
  return fmt(re) + (im < 0 ? "-" : "+") + fmt(std::abs(im)) + "i";
}

// Distance between reduced classes, allowing the mirror image.
double class_gap(double re, double im, const double got[2]) {
  double a[2], b[2];
  if (ft_reduce(re, im, a, nullptr) != FT_OK || ft_reduce(-re, im, b, nullptr) != FT_OK) return INFINITY;
  return std::min(std::hypot(a[0] - got[0], a[1] - got[1]), std::hypot(b[0] - got[0], b[1] - got[1]));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flattori: PL isometric embeddings of flat tori"};
  app.require_subcommand(1);

  std::string tau_s, out_path, method = "auto", report_path, which = "merged";
  int n = 0, d = 0;
  double h = 0;
  long budget = 0, samples = 10000;
  unsigned long long seed = 1;
  double iso_tol = 1e-8, flat_tol = 1e-8, mod_tol = 1e-6;
  bool allow_intersections = false;

  auto* embed = app.add_subcommand("embed", "build an embedded torus for a modulus");
  embed->set_help_flag("--help", "print this help");  // -h would clash with --h
  embed->add_option("--tau", tau_s, "modulus as RE,IM")->required();
  embed->add_option("--method", method, "auto|diplotorus|zalgaller-long|bz-conformal|universal")
      ->check(CLI::IsMember({"auto", "diplotorus", "zalgaller-long", "bz-conformal", "universal"}));
  embed->add_option("--out", out_path, "output .obj, .off or .json")->required();
  embed->add_option("--n", n, "diplotorus polygon size");
  embed->add_option("--d", d, "diplotorus twist");
  embed->add_option("--h", h, "gasket height of the long route");
  embed->add_option("--subdiv-budget", budget, "face budget of the BZ route");
  embed->add_option("--seed", seed, "accepted for symmetry; every route is deterministic");

  std::string verify_path;
  auto* verify = app.add_subcommand("verify", "check isometry, flatness, embeddedness and modulus");
  verify->add_option("file", verify_path, "mesh file (.obj or .off)")->required();
  verify->add_option("--tau", tau_s, "expected modulus RE,IM (default: sidecar)");
  verify->add_option("--report", report_path, "write a JSON report");
  verify->add_option("--iso-tol", iso_tol, "max relative edge-length error")->capture_default_str();
  verify->add_option("--flat-tol", flat_tol, "max angle defect at a vertex")->capture_default_str();
  verify->add_option("--modulus-tol", mod_tol, "max distance of reduced moduli")->capture_default_str();
  verify->add_flag("--allow-intersections", allow_intersections, "report self-intersections without failing");

  auto* uni = app.add_subcommand("universal", "universal triangulations");
  uni->require_subcommand(1);
  auto* emit = uni->add_subcommand("emit", "write a triangulation as JSON");
  emit->add_option("--which", which, "long|short|merged")->check(CLI::IsMember({"long", "short", "merged"}));
  emit->add_option("--out", out_path)->required();
  auto* census = uni->add_subcommand("census", "print the exact overlay counts");

  auto* cov = app.add_subcommand("coverage", "audit that short moduli are realized by 19-family diplotori");
  cov->add_option("--samples", samples)->check(CLI::PositiveNumber);
  cov->add_option("--seed", seed);

  auto* red = app.add_subcommand("reduce", "reduce a modulus to the fundamental domain");
  red->add_option("--tau", tau_s, "modulus as RE,IM")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  Tau tau;
  const bool have_tau = !tau_s.empty();
  if (have_tau && !parse_tau(tau_s, tau)) {
    std::cerr << "error: --tau expects RE,IM\n";
    return kUsage;
  }

  if (*red) {
    double r[2];
    long long m[4];
    if (const ft_status s = ft_reduce(tau.re, tau.im, r, m); s != FT_OK) return fail(s);
    std::cout << complex_str(r[0], r[1]) << "\n";
    std::cout << "[[" << m[0] << ", " << m[1] << "], [" << m[2] << ", " << m[3] << "]]\n";
    return kOk;
  }

  if (*embed) {
    ft_method m = FT_METHOD_AUTO;
    if (method == "diplotorus") m = FT_METHOD_DIPLOTORUS;
    if (method == "zalgaller-long") m = FT_METHOD_ZALGALLER_LONG;
    if (method == "bz-conformal") m = FT_METHOD_BZ_CONFORMAL;
    if (method == "universal") m = FT_METHOD_UNIVERSAL;
    const ft_embed_options o{n, d, h, budget};
    ft_mesh* mesh = nullptr;
    if (const ft_status s = ft_embed(tau.re, tau.im, m, &o, &mesh); s != FT_OK) return fail(s);
    const ft_status s = ft_mesh_save(mesh, out_path.c_str());
    std::cout << ft_mesh_route(mesh) << ": " << ft_mesh_vertex_count(mesh) << " vertices, "
              << ft_mesh_face_count(mesh) << " faces -> " << out_path << "\n";
    ft_mesh_free(mesh);
    return s == FT_OK ? kOk : fail(s);
  }

  if (*verify) {
    ft_mesh* mesh = nullptr;
    if (const ft_status s = ft_mesh_load(verify_path.c_str(), &mesh); s != FT_OK) return fail(s);
    bool check_tau = have_tau;
    if (!have_tau) {
      double t[2];
      if (ft_mesh_tau(mesh, t) == FT_OK) tau = {t[0], t[1]}, check_tau = true;
    }
    ft_report r{};
    const ft_status s = ft_verify(mesh, &r);
    ft_mesh_free(mesh);
    if (s != FT_OK) return fail(s);
    const double gap = check_tau && r.has_modulus ? class_gap(tau.re, tau.im, r.modulus) : 0;
    const bool ok_iso = r.isometry_max_rel_error < iso_tol;
    const bool ok_flat = r.flatness_max_defect < flat_tol;
    const bool ok_top = r.chi == 0 && r.closed && r.orientable;
    const bool ok_emb = allow_intersections || r.self_intersections == 0;
    const bool ok_mod = !check_tau || (r.has_modulus && gap < mod_tol);
    const bool ok = ok_iso && ok_flat && ok_top && ok_emb && ok_mod;
    std::cout << "isometry " << fmt(r.isometry_max_rel_error) << (ok_iso ? " ok" : " FAIL") << "\n"
              << "flatness " << fmt(r.flatness_max_defect) << (ok_flat ? " ok" : " FAIL") << "\n"
              << "euler V=" << r.V << " E=" << r.E << " F=" << r.F << " chi=" << r.chi << (ok_top ? " ok" : " FAIL")
              << "\n"
              << "self-intersections " << r.self_intersections << (ok_emb ? " ok" : " FAIL") << "\n";
    if (r.has_modulus) std::cout << "modulus " << complex_str(r.modulus[0], r.modulus[1]);
    else std::cout << "modulus unavailable";
    std::cout << (check_tau ? (ok_mod ? " ok" : " FAIL") : "") << "\n";
    if (!report_path.empty()) {
      nlohmann::json j;
      j["isometry_max_rel_error"] = r.isometry_max_rel_error;
      j["flatness_max_defect"] = r.flatness_max_defect;
      j["self_intersections"] = r.self_intersections;
      j["euler"] = {{"V", r.V}, {"E", r.E}, {"F", r.F}, {"chi", r.chi}, {"closed", bool(r.closed)},
                    {"orientable", bool(r.orientable)}, {"simplicial", bool(r.simplicial)}};
      if (r.has_modulus) j["extracted_modulus"] = {r.modulus[0], r.modulus[1]};
      if (check_tau) j["expected_modulus"] = {tau.re, tau.im};
      j["pass"] = ok;
      std::ofstream f(report_path);
      if (!f) {
        std::cerr << "error: cannot write " << report_path << "\n";
        return kVerifyFail;
      }
      f << j.dump(2) << "\n";
    }
    return ok ? kOk : kVerifyFail;
  }

  if (*emit) {
    const ft_layout l = which == "long" ? FT_LAYOUT_LONG : (which == "short" ? FT_LAYOUT_SHORT : FT_LAYOUT_MERGED);
    if (const ft_status s = ft_universal_emit(l, out_path.c_str()); s != FT_OK) return fail(s);
    std::cout << which << " triangulation -> " << out_path << "\n";
    return kOk;
  }

  if (*census) {
    ft_census c{};
    if (const ft_status s = ft_universal_census(&c); s != FT_OK) return fail(s);
    std::cout << "short: " << c.short_per_period << " per period, " << c.short_intersections << " intersections, "
              << c.short_vertices << " vertices, " << c.short_triangles << " triangles, chi " << c.short_chi << "\n"
              << "merged: E_c " << c.E_c << ", V_ext " << c.V_ext[0] << "/" << c.V_ext[1] << "/" << c.V_ext[2]
              << ", V_long " << c.V_long << ", V_c " << c.V_c << " (" << c.V_c_new << " new) x " << c.central_edges
              << ", V_d " << c.V_d << ", V_cap " << c.V_cap << ", short originals " << c.short_originals << "\n"
              << "merged: " << c.merged_vertices << " vertices, " << c.merged_triangles << " triangles, chi "
              << c.merged_chi << "\n";
    return kOk;
  }

  if (*cov) {
    ft_coverage_result r{};
    if (const ft_status s = ft_coverage(samples, seed, &r); s != FT_OK) return fail(s);
    std::cout << r.realized << "/" << r.samples << " realized\n"
              << "max residual " << fmt(r.max_residual) << ", min region margin " << fmt(r.min_margin) << "\n";
    return r.failures == 0 ? kOk : kVerifyFail;
  }
  return kUsage;
}
