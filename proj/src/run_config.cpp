#include "lpsrp/run_config.hpp"

#include <cmath>
#include <set>

#include "lpsrp/errors.hpp"
#include "lpsrp/series_io.hpp"

namespace lpsrp {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw InvalidArgument(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw InvalidArgument("unknown key '" + k + "' in " + where);
}

template <class T> void read(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw InvalidArgument(where + "." + key + " must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw InvalidArgument(where + "." + key + " must be an integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw InvalidArgument(where + "." + key + " must be a number");
  } else {
    if (!v.is_string()) throw InvalidArgument(where + "." + key + " must be a string");
  }
  dst = v.get<T>();
}

template <std::size_t N>
void read_array(const json& j, const char* key, std::array<double, N>& dst, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != N)
    throw InvalidArgument(where + "." + key + " must be an array of " + std::to_string(N) + " numbers");
  for (std::size_t n = 0; n < N; ++n) {
    if (!v[n].is_number()) throw InvalidArgument(where + "." + key + " must hold numbers");
    dst[n] = v[n].get<double>();
  }
}

void read_range(const json& j, const char* key, AngleRange& r, const std::string& where) {
  if (!j.contains(key)) return;
  const std::string w = where + "." + key;
  check_keys(j.at(key), w, {"start", "stop", "count"});
  read(j.at(key), "start", r.start, w);
  read(j.at(key), "stop", r.stop, w);
  read(j.at(key), "count", r.count, w);
}

void need(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void RunConfig::validate() const {
  need(finite(mu) && mu > 0 && mu <= 0.5, "mu must lie in (0, 0.5]");
  need(finite(beta) && beta >= 0 && beta < 1, "beta must lie in [0, 1)");
  need(finite(alpha_deg) && alpha_deg >= -90 && alpha_deg <= 90, "alpha_deg must lie in [-90, 90]");
  need(finite(gamma_deg) && gamma_deg >= 0 && gamma_deg <= 180, "gamma_deg must lie in [0, 180]");
  need(lagrange_index >= 1 && lagrange_index <= 5, "lagrange_index must be 1..5");
  need(order >= 1 && order <= 15, "order must be 1..15");
  for (double a : orbit.amplitudes) need(finite(a), "orbit.amplitudes must be finite");
  for (double a : orbit.phases_deg) need(finite(a), "orbit.phases_deg must be finite");
  need(finite(orbit.t_span[0]) && finite(orbit.t_span[1]), "orbit.t_span must be finite");
  need(orbit.samples >= 2, "orbit.samples must be at least 2");
  need(orbit.frame == "barycentric" || orbit.frame == "aep", "orbit.frame must be 'barycentric' or 'aep'");
  need(finite(manifold.alpha3) && finite(manifold.alpha4), "manifold amplitudes must be finite");
  need(finite(manifold.epsilon) && manifold.epsilon >= 0, "manifold.epsilon must be non-negative");
  need(finite(manifold.duration) && manifold.duration > 0, "manifold.duration must be positive");
  need(manifold.samples >= 2, "manifold.samples must be at least 2");
  need(manifold.frame == "barycentric" || manifold.frame == "aep", "manifold.frame must be 'barycentric' or 'aep'");
  need(study.n3 >= 1 && study.n4 >= 1, "study mesh must have at least one point per axis");
  need(finite(study.min3) && finite(study.max3) && study.min3 >= 0 && (study.n3 == 1 || study.max3 > study.min3),
       "study alpha3 range must be non-negative and increasing");
  need(finite(study.min4) && finite(study.max4) && study.min4 >= 0 && (study.n4 == 1 || study.max4 > study.min4),
       "study alpha4 range must be non-negative and increasing");
  need(finite(study.t_eval), "study.t_eval must be finite");
  need(study.jobs >= 1, "study.jobs must be at least 1");
  need(study.mode == "deviation" || study.mode == "direct", "study.mode must be 'deviation' or 'direct'");
  for (const AngleRange* r : {&sweep.alpha_deg, &sweep.gamma_deg}) {
    need(r->count >= 1, "sweep ranges need count >= 1");
    need(finite(r->start) && finite(r->stop) && (r->count == 1 || r->stop > r->start),
         "sweep ranges must be increasing");
  }
  need(sweep.alpha_deg.start >= -90 && sweep.alpha_deg.stop <= 90, "sweep alpha range must lie in [-90, 90]");
  need(sweep.gamma_deg.start >= 0 && sweep.gamma_deg.stop <= 180, "sweep gamma range must lie in [0, 180]");
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  const std::string top = "config";
  check_keys(j, top,
             {"mu", "beta", "alpha_deg", "gamma_deg", "lagrange_index", "order", "hyperbolic", "orbit", "manifold",
              "study", "sweep", "output"});
  read(j, "mu", c.mu, top);
  read(j, "beta", c.beta, top);
  read(j, "alpha_deg", c.alpha_deg, top);
  read(j, "gamma_deg", c.gamma_deg, top);
  read(j, "lagrange_index", c.lagrange_index, top);
  read(j, "order", c.order, top);
  read(j, "hyperbolic", c.hyperbolic, top);
  if (j.contains("orbit")) {
    const json& o = j.at("orbit");
    check_keys(o, "orbit", {"amplitudes", "phases_deg", "t_span", "samples", "frame"});
    read_array(o, "amplitudes", c.orbit.amplitudes, "orbit");
    read_array(o, "phases_deg", c.orbit.phases_deg, "orbit");
    read_array(o, "t_span", c.orbit.t_span, "orbit");
    read(o, "samples", c.orbit.samples, "orbit");
    read(o, "frame", c.orbit.frame, "orbit");
  }
  if (j.contains("manifold")) {
    const json& m = j.at("manifold");
    check_keys(m, "manifold", {"alpha3", "alpha4", "epsilon", "duration", "samples", "integrate", "frame"});
    read(m, "alpha3", c.manifold.alpha3, "manifold");
    read(m, "alpha4", c.manifold.alpha4, "manifold");
    read(m, "epsilon", c.manifold.epsilon, "manifold");
    read(m, "duration", c.manifold.duration, "manifold");
    read(m, "samples", c.manifold.samples, "manifold");
    read(m, "integrate", c.manifold.integrate, "manifold");
    read(m, "frame", c.manifold.frame, "manifold");
  }
  if (j.contains("study")) {
    const json& s = j.at("study");
    check_keys(s, "study", {"n3", "n4", "min3", "max3", "min4", "max4", "t_eval", "jobs", "mode"});
    read(s, "n3", c.study.n3, "study");
    read(s, "n4", c.study.n4, "study");
    read(s, "min3", c.study.min3, "study");
    read(s, "max3", c.study.max3, "study");
    read(s, "min4", c.study.min4, "study");
    read(s, "max4", c.study.max4, "study");
    read(s, "t_eval", c.study.t_eval, "study");
    read(s, "jobs", c.study.jobs, "study");
    read(s, "mode", c.study.mode, "study");
  }
  if (j.contains("sweep")) {
    check_keys(j.at("sweep"), "sweep", {"alpha_deg", "gamma_deg"});
    read_range(j.at("sweep"), "alpha_deg", c.sweep.alpha_deg, "sweep");
    read_range(j.at("sweep"), "gamma_deg", c.sweep.gamma_deg, "sweep");
  }
  if (j.contains("output")) {
    check_keys(j.at("output"), "output", {"coeffs", "out"});
    read(j.at("output"), "coeffs", c.output.coeffs, "output");
    read(j.at("output"), "out", c.output.out, "output");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const RunConfig& c) {
  auto range = [](const AngleRange& r) { return json{{"start", r.start}, {"stop", r.stop}, {"count", r.count}}; };
  return {{"mu", c.mu},
          {"beta", c.beta},
          {"alpha_deg", c.alpha_deg},
          {"gamma_deg", c.gamma_deg},
          {"lagrange_index", c.lagrange_index},
          {"order", c.order},
          {"hyperbolic", c.hyperbolic},
          {"orbit",
           {{"amplitudes", c.orbit.amplitudes},
            {"phases_deg", c.orbit.phases_deg},
            {"t_span", c.orbit.t_span},
            {"samples", c.orbit.samples},
            {"frame", c.orbit.frame}}},
          {"manifold",
           {{"alpha3", c.manifold.alpha3},
            {"alpha4", c.manifold.alpha4},
            {"epsilon", c.manifold.epsilon},
            {"duration", c.manifold.duration},
            {"samples", c.manifold.samples},
            {"integrate", c.manifold.integrate},
            {"frame", c.manifold.frame}}},
          {"study",
           {{"n3", c.study.n3},
            {"n4", c.study.n4},
            {"min3", c.study.min3},
            {"max3", c.study.max3},
            {"min4", c.study.min4},
            {"max4", c.study.max4},
            {"t_eval", c.study.t_eval},
            {"jobs", c.study.jobs},
            {"mode", c.study.mode}}},
          {"sweep", {{"alpha_deg", range(c.sweep.alpha_deg)}, {"gamma_deg", range(c.sweep.gamma_deg)}}},
          {"output", {{"coeffs", c.output.coeffs}, {"out", c.output.out}}}};
}

void apply_overrides(RunConfig& c, const ConfigOverrides& o) {
  if (o.mu) c.mu = *o.mu;
  if (o.beta) c.beta = *o.beta;
  if (o.alpha_deg) c.alpha_deg = *o.alpha_deg;
  if (o.gamma_deg) c.gamma_deg = *o.gamma_deg;
  if (o.order) c.order = *o.order;
  if (o.lagrange_index) c.lagrange_index = *o.lagrange_index;
  if (o.jobs) c.study.jobs = *o.jobs;
  if (o.coeffs) c.output.coeffs = *o.coeffs;
  if (o.out) c.output.out = *o.out;
  c.validate();
}

}  // namespace lpsrp
