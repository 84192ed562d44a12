#include "frechet_risk/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

namespace frechet::io {

namespace fs = std::filesystem;

namespace {

Vector vector_from_json(const json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.size();
  if (rows == 0) throw ValidationError("matrix: empty");
  const auto cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ValidationError("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json matrix_to_json(const Matrix& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

CentralLaw central_from_json(const json& j) {
  const std::string name = j.value("central", "normal");
  if (name == "normal") return CentralLaw::normal();
  if (name == "student-t" || name == "student") {
    return CentralLaw::student(j.value("df", 6.0));
  }
  throw ValidationError("unknown central law '" + name + "'");
}

RiskMapping named_custom(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  const double scale = j.value("scale", 1.0);
  if (name == "softplus") {
    // log(1 + e^{scale z}) on the first coordinate
    return RiskMapping::custom(
        [scale](const Vector& z) {
          const double t = scale * z(0);
          return t > 30.0 ? t : std::log1p(std::exp(t));
        },
        [scale](const Vector& z) {
          Vector g = Vector::Zero(z.size());
          g(0) = scale / (1.0 + std::exp(-scale * z(0)));
          return g;
        });
  }
  if (name == "softplus-multi") {
    // log(1 + e^{scale * sum z_l}), smooth in every coordinate
    return RiskMapping::custom(
        [scale](const Vector& z) {
          const double t = scale * z.sum();
          return t > 30.0 ? t : std::log1p(std::exp(t));
        },
        [scale](const Vector& z) {
          const double s = scale / (1.0 + std::exp(-scale * z.sum()));
          return Vector::Constant(z.size(), s);
        });
  }
  throw ValidationError("unknown custom mapping '" + name + "'");
}

}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

QuantileModel quantile_from_json(const json& j) {
  if (j.contains("grid")) {
    QuantileModel q;
    q.grid = j.at("grid").get<std::vector<double>>();
    q.values = j.at("values").get<std::vector<double>>();
    return q;
  }
  const int m = j.value("grid_size", kDefaultGridSize);
  const std::string family = j.at("family").get<std::string>();
  const json params = j.value("params", json::object());
  if (family == "normal") {
    return QuantileModel::normal(params.value("mean", 0.0), params.value("sd", 1.0), m);
  }
  if (family == "student-t" || family == "student") {
    return QuantileModel::student(params.value("df", 6.0), params.value("loc", 0.0),
                                  params.value("scale", 1.0), m);
  }
  if (family == "constant") {
    return QuantileModel::constant(params.value("value", 0.0), m);
  }
  throw ValidationError("unknown quantile family '" + family + "'");
}

LocationScatterModel ls_from_json(const json& j) {
  LocationScatterModel m;
  m.m = vector_from_json(j.at("m"));
  m.S = matrix_from_json(j.at("S"));
  m.central = central_from_json(j);
  return m;
}

GridDensityModel density_from_json(const json& j) {
  GridDensityModel g;
  for (const auto& ax : j.at("axes")) {
    g.axes.push_back({ax.at("lo").get<double>(), ax.at("hi").get<double>(),
                      ax.at("n").get<int>()});
  }
  if (j.contains("density")) {
    g.density = j.at("density").get<std::vector<double>>();
    return g;
  }
  const std::string family = j.at("family").get<std::string>();
  const json params = j.value("params", json::object());
  if (family == "normal" && g.axes.size() == 1) {
    auto model = GridDensityModel::gaussian(params.value("mean", 0.0),
                                            params.value("var", 1.0), g.axes[0]);
    const double mass = model.integral();
    for (auto& v : model.density) v /= mass;
    return model;
  }
  throw ValidationError("unknown density family '" + family + "' (1-D normal supported)");
}

PriorSet prior_set_from_json(const json& j, const std::string& base_dir) {
  const std::string kind = j.at("kind").get<std::string>();
  WeightVector w{j.at("weights").get<std::vector<double>>()};

  auto resolve = [&](const json& entry) -> json {
    if (entry.is_string()) {
      const fs::path p = fs::path(entry.get<std::string>());
      const fs::path full = p.is_absolute() ? p : fs::path(base_dir) / p;
      return load_json(full.string());
    }
    return entry;
  };

  if (kind == "quantile") {
    std::vector<QuantileModel> models;
    for (const auto& entry : j.at("models")) models.push_back(quantile_from_json(resolve(entry)));
    return PriorSet::of(std::move(models), std::move(w));
  }
  if (kind == "location-scatter") {
    std::vector<LocationScatterModel> models;
    for (const auto& entry : j.at("models")) models.push_back(ls_from_json(resolve(entry)));
    return PriorSet::of(std::move(models), std::move(w));
  }
  if (kind == "grid-density") {
    std::vector<GridDensityModel> models;
    for (const auto& entry : j.at("models")) models.push_back(density_from_json(resolve(entry)));
    return PriorSet::of(std::move(models), std::move(w));
  }
  throw ValidationError("unknown prior-set kind '" + kind + "'");
}

PriorSet load_prior_set(const std::string& path) {
  return prior_set_from_json(load_json(path), fs::path(path).parent_path().string());
}

RiskMapping mapping_from_json(const json& j) {
  const std::string tag = j.at("tag").get<std::string>();
  if (tag == "affine") {
    return RiskMapping::affine(j.value("alpha", 0.0), j.value("b", 0.0));
  }
  if (tag == "quadratic") {
    return RiskMapping::quadratic(j.value("alpha", 0.0), j.value("b", 0.0),
                                  j.value("c", 0.0));
  }
  if (tag == "linear-multi") {
    return RiskMapping::linear_multi(vector_from_json(j.at("a")));
  }
  if (tag == "quadratic-multi") {
    return RiskMapping::quadratic_multi(vector_from_json(j.at("a")),
                                        matrix_from_json(j.at("A")));
  }
  if (tag == "custom") {
    return named_custom(j);
  }
  throw ValidationError("unknown mapping tag '" + tag + "'");
}

RiskMapping load_mapping(const std::string& path) { return mapping_from_json(load_json(path)); }

json to_json(const QuantileModel& q) {
  return json{{"kind", "quantile"}, {"grid", q.grid}, {"values", q.values}};
}

json to_json(const LocationScatterModel& m) {
  json j{{"kind", "location-scatter"},
         {"m", vector_to_json(m.m)},
         {"S", matrix_to_json(m.S)},
         {"central", m.central.name()}};
  if (m.central.family == CentralLaw::Family::student_t) j["df"] = m.central.df;
  return j;
}

json to_json(const GridDensityModel& g) {
  json axes = json::array();
  for (const auto& ax : g.axes) {
    axes.push_back({{"lo", ax.lo}, {"hi", ax.hi}, {"n", ax.n}});
  }
  return json{{"kind", "grid-density"}, {"axes", axes}, {"density", g.density}};
}

json to_json(const BarycenterResult& r) {
  json model;
  switch (r.kind) {
    case ModelKind::quantile: model = to_json(r.quantile); break;
    case ModelKind::location_scatter: model = to_json(r.ls); break;
    case ModelKind::grid_density: model = to_json(r.density); break;
  }
  return json{{"model", model},
              {"frechet_variance", r.frechet_variance},
              {"iterations", r.iterations},
              {"residual", r.residual}};
}

json to_json(const Risk1dReport& r) {
  return json{{"value", r.value},
              {"gamma", r.gamma},
              {"method", r.method},
              {"maximizer", to_json(r.maximizer)},
              {"diagnostics",
               {{"iterations", r.iterations},
                {"residual", r.residual},
                {"monotonicity_repairs", r.monotonicity_repairs},
                {"zeroth_order", r.zeroth_order}}}};
}

json to_json(const RiskLsReport& r) {
  json j{{"value", r.value},
         {"gamma", r.gamma},
         {"method", r.method},
         {"maximizer", {{"m", vector_to_json(r.m)}, {"S", matrix_to_json(r.S)}}},
         {"diagnostics",
          {{"iterations", r.iterations},
           {"residual", r.residual},
           {"phi_value", r.phi_value},
           {"penalty", r.penalty}}}};
  if (r.has_pert) {
    j["perturbation"] = {{"S_tilde", matrix_to_json(r.pert.S_tilde)},
                         {"residual", r.pert.residual}};
  }
  return j;
}

json to_json(const EntropicReport& r) {
  return json{{"value", r.value},
              {"gamma", r.gamma},
              {"method", r.method},
              {"log_c0", r.log_c0},
              {"diagnostics", {{"iterations", r.iterations}, {"residual", r.residual}}}};
}

json to_json(const AllocationReport& r) {
  return json{{"total_risk", r.total_risk},
              {"contributions", r.contributions},
              {"method", r.method},
              {"gamma", r.gamma},
              {"euler_gap", r.euler_gap},
              {"residual", r.residual}};
}

json to_json(const PremiumSolution& r) {
  return json{{"m1", vector_to_json(r.m1)},
              {"m2", vector_to_json(r.m2)},
              {"S1", matrix_to_json(r.S1)},
              {"S2", matrix_to_json(r.S2)},
              {"risk", r.risk},
              {"premium", r.premium},
              {"iterations", r.iterations},
              {"residual", r.residual}};
}

SimulationConfig simulation_config_from_json(const json& j) {
  SimulationConfig cfg;
  if (j.contains("true_params")) {
    const auto& t = j.at("true_params");
    cfg.m1 = t.value("m1", cfg.m1);
    cfg.s1 = t.value("s1", cfg.s1);
    cfg.m2 = t.value("m2", cfg.m2);
    cfg.s2 = t.value("s2", cfg.s2);
  }
  if (j.contains("scales")) {
    const auto& s = j.at("scales");
    cfg.scales = {s.value("hh", cfg.scales[0]), s.value("mh", cfg.scales[1]),
                  s.value("lh", cfg.scales[2])};
  }
  cfg.n_experts = j.value("n_experts", cfg.n_experts);
  cfg.gamma_grid = j.value("gamma_grid", cfg.gamma_grid);
  cfg.replications = j.value("replications", cfg.replications);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.a1 = j.value("a1", cfg.a1);
  cfg.a2 = j.value("a2", cfg.a2);
  cfg.entropic_grid_points = j.value("entropic_grid_points", cfg.entropic_grid_points);
  cfg.validate();
  return cfg;
}

void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path dir = target.parent_path().empty() ? "." : target.parent_path();
  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw NumericalError("cannot write to " + tmp.string());
    out << content;
    if (!out.good()) {
      std::remove(tmp.string().c_str());
      throw NumericalError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

}  // namespace frechet::io
