#include "ssgain/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace ssgain {

namespace {

using nlohmann::json;

long dt_floor(double t) {
  if (t < 0.0) throw std::invalid_argument("response times must be >= 0");
  return static_cast<long>(std::floor(t));
}

std::string family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::TC: return "tc";
    case KernelFamily::DC: return "dc";
    case KernelFamily::SS: return "ss";
  }
  return "tc";
}

KernelFamily family_from(const std::string& s) {
  if (s == "tc") return KernelFamily::TC;
  if (s == "dc") return KernelFamily::DC;
  if (s == "ss") return KernelFamily::SS;
  throw ModelError("unknown kernel family: " + s);
}

std::string loss_name(LossKind k) {
  switch (k) {
    case LossKind::SquaredError: return "squared";
    case LossKind::Huber: return "huber";
    case LossKind::PseudoHuber: return "pseudo-huber";
  }
  return "squared";
}

LossKind loss_from(const std::string& s) {
  if (s == "squared") return LossKind::SquaredError;
  if (s == "huber") return LossKind::Huber;
  if (s == "pseudo-huber") return LossKind::PseudoHuber;
  throw ModelError("unknown loss: " + s);
}

json bound_to_json(double b) {
  if (std::isinf(b)) return nullptr;
  return b;
}

double bound_from_json(const json& j, double fallback) {
  if (j.is_null()) return fallback;
  return j.get<double>();
}

}  // namespace

IdentifiedModel make_model(const GramSystem& gram, double lambda,
                           const Loss& loss, const GainConstraint& constraint,
                           const Solution& solution) {
  IdentifiedModel m;
  m.kernel = gram.kernel;
  m.input = gram.input;
  m.sample_times = gram.sample_times;
  m.index_set = gram.index_set;
  m.x = solution.x;
  m.lambda = lambda;
  m.loss = loss;
  m.constraint = constraint;
  m.gain = gram.a0.dot(solution.x);
  return m;
}

double impulse_response(const IdentifiedModel& model, double t) {
  double g = model.x(0) * phi0_eval(model.kernel, t);
  for (std::size_t k = 0; k < model.index_set.size(); ++k)
    g += model.x(static_cast<Eigen::Index>(k + 1)) *
         representer_eval(model.kernel, model.input,
                          model.sample_times[model.index_set.indices[k]], t);
  return g;
}

std::vector<double> impulse_response(const IdentifiedModel& model,
                                     const std::vector<double>& times) {
  std::vector<double> out(times.size());
  if (model.kernel.domain == TimeDomain::DT && !model.index_set.indices.empty()) {
    // g(t) = x0 phi0(t) + sum_s k(t,s) v_s with the input convolution v
    // shared across all evaluation times.
    const auto& u = std::get<DtInput>(model.input);
    long max_tau = 0;
    for (std::size_t idx : model.index_set.indices)
      max_tau = std::max(max_tau, static_cast<long>(std::llround(
                                      model.sample_times[idx])));
    std::vector<double> v(static_cast<std::size_t>(max_tau) + 1, 0.0);
    for (std::size_t k = 0; k < model.index_set.size(); ++k) {
      const long tau = static_cast<long>(
          std::llround(model.sample_times[model.index_set.indices[k]]));
      const double xk = model.x(static_cast<Eigen::Index>(k + 1));
      for (long s = 0; s <= tau; ++s)
        v[static_cast<std::size_t>(s)] += xk * u.eval(tau - s);
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
      double g = model.x(0) * phi0_eval(model.kernel, times[i]);
      for (std::size_t s = 0; s < v.size(); ++s)
        if (v[s] != 0.0)
          g += kernel_eval(model.kernel, times[i], static_cast<double>(s)) *
               v[s];
      out[i] = g;
    }
    return out;
  }
  for (std::size_t i = 0; i < times.size(); ++i)
    out[i] = impulse_response(model, times[i]);
  return out;
}

std::vector<double> step_response(const IdentifiedModel& model,
                                  const std::vector<double>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("step_response: grid must be sorted");
  std::vector<double> out(grid.size());
  if (model.kernel.domain == TimeDomain::DT) {
    const long horizon = grid.empty() ? -1 : dt_floor(grid.back());
    std::vector<double> times;
    for (long s = 0; s <= horizon; ++s)
      times.push_back(static_cast<double>(s));
    const std::vector<double> g = impulse_response(model, times);
    std::vector<double> cum(g.size());
    double acc = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s) {
      acc += g[s];
      cum[s] = acc;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const long t = dt_floor(grid[i]);
      out[i] = t < 0 ? 0.0 : cum[static_cast<std::size_t>(t)];
    }
    return out;
  }
  const QuadratureConfig cfg;
  const auto g = [&](double s) { return impulse_response(model, s); };
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0)
      throw std::invalid_argument("step_response: grid must be >= 0");
    if (grid[i] > prev) acc += integrate(g, prev, grid[i], cfg);
    prev = std::max(prev, grid[i]);
    out[i] = acc;
  }
  return out;
}

std::vector<double> predict(const IdentifiedModel& model,
                            const std::vector<double>& times) {
  if (model.kernel.domain == TimeDomain::DT) {
    // y(tau) = sum_{t<=tau} g(t) u(tau - t): exact finite convolution.
    const auto& u = std::get<DtInput>(model.input);
    long max_tau = 0;
    for (double t : times) max_tau = std::max(max_tau, dt_floor(t));
    std::vector<double> tgrid;
    for (long s = 0; s <= max_tau; ++s)
      tgrid.push_back(static_cast<double>(s));
    const std::vector<double> g = impulse_response(model, tgrid);
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      const long tau = dt_floor(times[i]);
      double acc = 0.0;
      for (long s = 0; s <= tau; ++s)
        acc += g[static_cast<std::size_t>(s)] * u.eval(tau - s);
      out[i] = acc;
    }
    return out;
  }
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    double acc = model.x(0) *
                 output_phi0_inner(model.kernel, model.input, times[i]);
    for (std::size_t k = 0; k < model.index_set.size(); ++k)
      acc += model.x(static_cast<Eigen::Index>(k + 1)) *
             output_inner(model.kernel, model.input,
                          model.sample_times[model.index_set.indices[k]],
                          times[i]);
    out[i] = acc;
  }
  return out;
}

Eigen::VectorXd predict(const GramSystem& gram, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(gram.sample_times.size()));
  for (std::size_t i = 0; i < gram.sample_times.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = gram.data_row(i).dot(x);
  // keep the index-set rows bit-identical to the solver's A x
  const Eigen::VectorXd ax = gram.A * x;
  for (std::size_t k = 0; k < gram.index_set.indices.size(); ++k)
    out(static_cast<Eigen::Index>(gram.index_set.indices[k])) =
        ax(static_cast<Eigen::Index>(k));
  return out;
}

double fit_metric(const std::vector<double>& est,
                  const std::vector<double>& ref) {
  if (est.size() != ref.size())
    throw std::invalid_argument("fit_metric: responses use different grids");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    num += (est[i] - ref[i]) * (est[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  if (den == 0.0)
    throw ModelError("fit_metric undefined: reference response is zero");
  return 100.0 * (1.0 - std::sqrt(num / den));
}

std::vector<double> default_response_grid(const KernelParams& kernel) {
  // alpha^{T/2} < 1e-10
  const double t_end =
      std::ceil(2.0 * std::log(1e-10) / std::log(kernel.alpha));
  std::vector<double> grid;
  if (kernel.domain == TimeDomain::DT) {
    for (long s = 0; s <= static_cast<long>(t_end); ++s)
      grid.push_back(static_cast<double>(s));
  } else {
    const std::size_t n = 500;
    for (std::size_t i = 0; i < n; ++i)
      grid.push_back(t_end * static_cast<double>(i) /
                     static_cast<double>(n - 1));
  }
  return grid;
}

void save_model(const IdentifiedModel& model, const std::string& path) {
  json j;
  j["kernel"] = {{"family", family_name(model.kernel.family)},
                 {"domain", model.kernel.domain == TimeDomain::DT ? "dt" : "ct"},
                 {"alpha", model.kernel.alpha},
                 {"gamma", model.kernel.gamma}};
  j["lambda"] = model.lambda;
  j["loss"] = {{"kind", loss_name(model.loss.kind)},
               {"sigma", model.loss.sigma}};
  j["constraint"] = {{"lo", bound_to_json(model.constraint.lo)},
                     {"hi", bound_to_json(model.constraint.hi)}};
  if (std::holds_alternative<DtInput>(model.input)) {
    j["input"] = {{"type", "dt"},
                  {"samples", std::get<DtInput>(model.input).samples}};
  } else {
    const auto& step = std::get<StepSignal>(model.input);
    j["input"] = {{"type", "steps"},
                  {"breakpoints", step.breakpoints},
                  {"levels", step.levels}};
  }
  j["sample_times"] = model.sample_times;
  j["index_set"] = model.index_set.indices;
  j["x"] = std::vector<double>(model.x.data(), model.x.data() + model.x.size());
  j["gain"] = model.gain;

  std::ofstream out(path);
  if (!out) throw ModelError(path + ": cannot write");
  out << j.dump(2) << '\n';
}

IdentifiedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError(path + ": cannot read");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ModelError(path + ": " + e.what());
  }
  IdentifiedModel m;
  try {
    m.kernel.family = family_from(j.at("kernel").at("family"));
    m.kernel.domain = j.at("kernel").at("domain") == "dt" ? TimeDomain::DT
                                                          : TimeDomain::CT;
    m.kernel.alpha = j.at("kernel").at("alpha");
    m.kernel.gamma = j.at("kernel").at("gamma");
    m.lambda = j.at("lambda");
    m.loss.kind = loss_from(j.at("loss").at("kind"));
    m.loss.sigma = j.at("loss").at("sigma");
    m.constraint.lo = bound_from_json(
        j.at("constraint").at("lo"), -std::numeric_limits<double>::infinity());
    m.constraint.hi = bound_from_json(
        j.at("constraint").at("hi"), std::numeric_limits<double>::infinity());
    const auto& ji = j.at("input");
    if (ji.at("type") == "dt") {
      m.input = DtInput{ji.at("samples").get<std::vector<double>>()};
    } else {
      StepSignal step;
      step.breakpoints = ji.at("breakpoints").get<std::vector<double>>();
      step.levels = ji.at("levels").get<std::vector<double>>();
      m.input = step;
    }
    m.sample_times = j.at("sample_times").get<std::vector<double>>();
    m.index_set.indices = j.at("index_set").get<std::vector<std::size_t>>();
    const auto xv = j.at("x").get<std::vector<double>>();
    m.x = Eigen::Map<const Eigen::VectorXd>(xv.data(),
                                            static_cast<Eigen::Index>(xv.size()));
    m.gain = j.at("gain");
  } catch (const json::exception& e) {
    throw ModelError(path + ": " + e.what());
  }
  m.kernel.validate();
  m.index_set.validate(m.sample_times.size());
  if (m.x.size() != static_cast<Eigen::Index>(m.index_set.size() + 1))
    throw ModelError(path + ": coefficient count does not match index set");
  return m;
}

}  // namespace ssgain
