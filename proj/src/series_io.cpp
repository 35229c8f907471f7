#include "lpsrp/series_io.hpp"

#include <fstream>
#include <sstream>

namespace lpsrp {

using nlohmann::json;

namespace {

json vec_json(const Vec3<double>& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3<double> vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-element array");
  return Vec3<double>(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

json series_to_json(const TrigSeries<double>& s) {
  json terms = json::array();
  for (const auto& e : s.terms()) {
    const TermIndex t = TermIndex::from_key(e.first);
    terms.push_back({{"i", t.i}, {"j", t.j}, {"k", t.k}, {"m", t.m}, {"p", t.p}, {"q", t.q},
                     {"c", e.second.c}, {"s", e.second.s}});
  }
  return {{"order", s.max_order()}, {"terms", std::move(terms)}};
}

TrigSeries<double> series_from_json(const json& j) {
  try {
    const int N = member(j, "order").get<int>();
    if (N < 0) throw FormatError("series order must be non-negative");
    TrigSeries<double> s(N);
    for (const auto& t : member(j, "terms")) {
      TermIndex idx{member(t, "i").get<int>(), member(t, "j").get<int>(), member(t, "k").get<int>(),
                    member(t, "m").get<int>(), member(t, "p").get<int>(), member(t, "q").get<int>()};
      if (idx.i < 0 || idx.j < 0 || idx.k < 0 || idx.m < 0) throw FormatError("negative amplitude exponent");
      if (idx.order() > N) throw FormatError("term order exceeds series order");
      s.set(idx, member(t, "c").get<double>(), member(t, "s").get<double>());
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed series: ") + e.what());
  }
}

json frequency_to_json(const FrequencySeries<double>& f) {
  json terms = json::array();
  for (const auto& [key, v] : f.terms()) {
    const auto e = FrequencySeries<double>::unpack(key);
    terms.push_back({{"i", e[0]}, {"j", e[1]}, {"k", e[2]}, {"m", e[3]}, {"c", v}});
  }
  return {{"order", f.max_order()}, {"terms", std::move(terms)}};
}

FrequencySeries<double> frequency_from_json(const json& j) {
  try {
    FrequencySeries<double> f(member(j, "order").get<int>());
    for (const auto& t : member(j, "terms")) {
      const int i = member(t, "i").get<int>(), jj = member(t, "j").get<int>(), k = member(t, "k").get<int>(),
                m = member(t, "m").get<int>();
      if (i < 0 || jj < 0 || k < 0 || m < 0) throw FormatError("negative amplitude exponent");
      f.set(i, jj, k, m, member(t, "c").get<double>());
    }
    return f;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed frequency series: ") + e.what());
  }
}

json linear_model_to_json(const LinearModel<double>& m) {
  json W = json::array();
  for (int r = 0; r < 3; ++r) W.push_back(json::array({m.omega_star(r, 0), m.omega_star(r, 1), m.omega_star(r, 2)}));
  json roots = json::array();
  for (const auto& l : m.eigenvalues) roots.push_back(json::array({l.real(), l.imag()}));
  json k = json::object();
  for (int n = 1; n <= 17; ++n) k["k" + std::to_string(n)] = m.k[n];
  return {{"omega_star", W},
          {"forcing", vec_json(m.forcing)},
          {"eigenvalues", roots},
          {"lambda_r", m.lambda_r},
          {"lambda_minus", m.lambda_minus},
          {"omega_0", m.omega_0},
          {"nu_0", m.nu_0},
          {"omega_r", m.omega_r},
          {"nu_r", m.nu_r},
          {"k", k},
          {"eigenvectors",
           {{"v1", vec_json(m.v1)},
            {"v2", vec_json(m.v2)},
            {"u1", vec_json(m.u1)},
            {"w1", vec_json(m.w1)},
            {"u2", vec_json(m.u2)},
            {"w2", vec_json(m.w2)}}},
          {"gamma_norm", m.consts.gamma_norm}};
}

json solution_to_json(const SeriesSolution<double>& s) {
  const auto& p = s.params();
  json diag = {{"groups", s.diagnostics.group_count},
               {"ill_conditioned", s.diagnostics.ill_conditioned},
               {"max_residual", s.diagnostics.max_residual}};
  json meta = {{"mu", p.mu},
               {"beta", p.beta},
               {"alpha_rad", p.alpha},
               {"gamma_rad", p.gamma},
               {"alpha_deg", rad2deg(p.alpha)},
               {"gamma_deg", rad2deg(p.gamma)},
               {"aep", vec_json(s.aep().position)},
               {"aep_residual", s.aep().residual_norm},
               {"aep_iterations", s.aep().iterations},
               {"hyperbolic", s.hyperbolic},
               {"linear", linear_model_to_json(s.linear)},
               {"diagnostics", diag}};
  static const char* names[] = {"x", "y", "z", "vx", "vy", "vz"};
  json series = json::object();
  for (int a = 0; a < 3; ++a) {
    series[names[a]] = series_to_json(s.pos[a]);
    series[names[3 + a]] = series_to_json(s.vel[a]);
  }
  return {{"format", series_format},
          {"order", s.order},
          {"metadata", meta},
          {"series", series},
          {"frequencies",
           {{"omega", frequency_to_json(s.freq.omega)},
            {"nu", frequency_to_json(s.freq.nu)},
            {"lambda", frequency_to_json(s.freq.lambda)}}}};
}

SeriesSolution<double> solution_from_json(const json& j) {
  try {
    if (member(j, "format").get<std::string>() != series_format)
      throw FormatError("unsupported coefficient file format");
    const int N = member(j, "order").get<int>();
    if (N < 1) throw FormatError("series order must be at least 1");
    const json& meta = member(j, "metadata");
    const auto params = SystemParams<double>::make(member(meta, "mu").get<double>(), member(meta, "beta").get<double>(),
                                                   member(meta, "alpha_rad").get<double>(),
                                                   member(meta, "gamma_rad").get<double>());
    Aep<double> aep;
    aep.params = params;
    aep.position = vec_from(member(meta, "aep"));
    aep.residual_norm = member(meta, "aep_residual").get<double>();
    aep.iterations = member(meta, "aep_iterations").get<int>();

    SeriesSolution<double> s;
    s.order = N;
    s.hyperbolic = member(meta, "hyperbolic").get<bool>();
    s.linear = build_linear_model(aep);
    static const char* names[] = {"x", "y", "z", "vx", "vy", "vz"};
    const json& series = member(j, "series");
    for (int a = 0; a < 3; ++a) {
      s.pos[a] = series_from_json(member(series, names[a]));
      s.vel[a] = series_from_json(member(series, names[3 + a]));
      if (s.pos[a].max_order() != N || s.vel[a].max_order() != N)
        throw FormatError("series order disagrees with the file order");
    }
    const json& fr = member(j, "frequencies");
    s.freq.omega = frequency_from_json(member(fr, "omega"));
    s.freq.nu = frequency_from_json(member(fr, "nu"));
    s.freq.lambda = frequency_from_json(member(fr, "lambda"));
    if (meta.contains("diagnostics")) {
      const auto& d = meta.at("diagnostics");
      s.diagnostics.group_count = d.value("groups", std::size_t(0));
      s.diagnostics.ill_conditioned = d.value("ill_conditioned", 0);
      s.diagnostics.max_residual = d.value("max_residual", 0.0);
    }
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed coefficient file: ") + e.what());
  }
}

std::string dump_document(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw InvalidArgument("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_solution(const std::string& path, const SeriesSolution<double>& s) {
  write_text_file(path, dump_document(solution_to_json(s)));
}

SeriesSolution<double> read_solution(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
  return solution_from_json(j);
}

}  // namespace lpsrp
