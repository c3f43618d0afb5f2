#include "uep/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace uep {
namespace {

std::string pairs_text(const SocketProfile& rho) {
  std::string out;
  char buf[64];
  for (const auto& [s, v] : rho) {
    std::snprintf(buf, sizeof buf, "%s%d:%.6f", out.empty() ? "" : " ", s, v);
    out += buf;
  }
  return out;
}

double to_real(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw DomainError(std::string("bad ") + what + " '" + s + "'");
  return v;
}

}  // namespace

Design make_design(const DesignSpec& spec) {
  spec.part.check();
  Design d;
  d.spec = spec;
  d.split = derive_class_lambdas(spec.lambda, spec.part, spec.dc);
  d.problem = opt::DesignProblem::from_split(d.split, spec.part, spec.dc);
  return d;
}

DesignSpec worked_example() {
  DesignSpec s;
  s.lambda = {{2, 0.2130}, {3, 0.0927}, {4, 0.2511}, {18, 0.2521}, {19, 0.0965}, {30, 0.0946}};
  s.part = ClassPartition{4096, 2048, {0.2, 0.8}};
  s.dc = 9;
  return s;
}

DesignSpec spec_from_document(const ProfileDocument& doc, DesignSpec base) {
  if (doc.global_lambda) base.lambda = *doc.global_lambda;
  if (auto v = doc.meta_value("n")) base.part.n = static_cast<int>(to_real(*v, "n"));
  if (auto v = doc.meta_value("k")) base.part.k = static_cast<int>(to_real(*v, "k"));
  if (auto v = doc.meta_value("dc")) base.dc = static_cast<int>(to_real(*v, "dc"));
  if (auto v = doc.meta_value("info_fractions")) base.part.info_fractions = parse_list(*v);
  return base;
}

ProfileDocument profile_document(const Design& d, const opt::OptimizedProfile& r, const opt::OptimizerConfig& cfg) {
  ProfileDocument doc;
  doc.set_meta("n", std::to_string(d.spec.part.n));
  doc.set_meta("k", std::to_string(d.spec.part.k));
  doc.set_meta("dc", std::to_string(d.spec.dc));
  doc.set_meta("info_fractions", join_list(d.spec.part.info_fractions));
  doc.set_meta("parity_class", std::to_string(d.problem.parity_class + 1));
  doc.global_lambda = d.spec.lambda;
  for (int c = 0; c < d.problem.classes(); ++c) {
    ClassSection s;
    s.lambda = d.split.lambdas[c].coeffs;
    s.nodes = d.split.node_counts[c];
    s.rho = r.rho[c];
    doc.classes[c] = std::move(s);
  }
  doc.check_types = r.joint;

  auto& pv = doc.provenance;
  pv.emplace_back("sigma2_design", format_real(r.sigma2));
  for (int c = 0; c < d.problem.classes(); ++c) {
    if (c == d.problem.parity_class) continue;
    const std::string tag = "c" + std::to_string(c + 1);
    pv.emplace_back("max_rho_" + tag, format_real(cfg.cap(c)));
    pv.emplace_back("d_min_" + tag, std::to_string(r.d_min[c]));
    pv.emplace_back("objective_" + tag, format_real(r.objective[c]));
    pv.emplace_back("realized_rho_" + tag, pairs_text(r.realized[c]));
  }
  pv.emplace_back("deviation", format_real(r.deviation));
  pv.emplace_back("certificate", r.certificate ? "converged" : "failed");
  pv.emplace_back("certificate_iterations", std::to_string(r.certificate_iterations));
  for (std::size_t i = 0; i < r.notes.size(); ++i) pv.emplace_back("note_" + std::to_string(i + 1), r.notes[i]);
  return doc;
}

BuiltCode build_code(const ProfileDocument& doc, int n, double rate, std::uint64_t seed) {
  DesignSpec spec = spec_from_document(doc);
  if (spec.lambda.empty()) throw code::ConstructionFailure("profile has no [global] lambda");
  if (doc.check_types.empty()) throw code::ConstructionFailure("profile has no check types");
  if (!(rate > 0.0)) rate = spec.part.rate();
  if (n > 0) spec.part.n = n;
  spec.part.k = static_cast<int>(std::lround(spec.part.n * rate));

  BuiltCode out;
  try {
    const Design d = make_design(spec);
    const auto& p = d.problem;
    out.parity_class = p.parity_class;
    const auto& parity_counts = d.split.node_counts[p.parity_class];
    code::QuotaOptions qo;
    qo.parity_class = p.parity_class;
    qo.parity_levels = p.parity_levels;
    const auto quotas = code::quantize_quotas(doc.check_types, p.checks, p.edges, qo, &out.notes);
    const auto layout = code::staircase_layout(p.checks, parity_counts);
    const auto rows = code::assign_rows(quotas, layout, p.parity_class, seed);
    code::PegOptions po;
    po.seed = seed;
    out.h = code::peg_construct(p.node_counts, p.parity_class, parity_counts, rows, po);
  } catch (const DomainError& e) {
    throw code::ConstructionFailure(e.what());
  }
  return out;
}

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(to_real(tok, "range"));
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw DomainError("range must be start:step:stop");
  const double a = parts[0], step = parts[1], b = parts[2];
  if (!(step > 0.0) || b < a) throw DomainError("range needs step > 0 and stop >= start");
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) out.push_back(a + i * step);
  return out;
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(to_real(tok, "list entry"));
  return out;
}

std::string join_list(const std::vector<double>& v) {
  std::string out;
  for (double x : v) {
    if (!out.empty()) out += ',';
    out += format_real(x);
  }
  return out;
}

}  // namespace uep
