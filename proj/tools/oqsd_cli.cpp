// Command-line front end: model selection, trajectory export, master-equation
// derivation and integration, singularity location, inflow-rate measures,
// mutual information, and generator tomography.  CSV columns are serialized
// with 12 significant digits so identical configs give byte-identical output.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oqsd/errors.hpp"
#include "oqsd/generators.hpp"
#include "oqsd/models.hpp"
#include "oqsd/nonmarkov.hpp"
#include "oqsd/tomography.hpp"

namespace {

using namespace oqsd;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::invalid_argument("cannot open output: " + path);
      os = &file;
    }
  }
  std::ostream& stream() { return *os; }
};

double param_or(const std::map<std::string, double>& p, const std::string& key,
                double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

ModelSpec build_model(const std::string& name,
                      const std::vector<std::string>& raw_params) {
  std::map<std::string, double> p;
  for (const auto& kv : raw_params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--param expects key=value, got: " + kv);
    }
    p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  ModelSpec model;
  if (name == "identity") {
    model = Identity{};
  } else if (name == "central-spin") {
    model = CentralSpin{int(param_or(p, "spins", 1)),
                        param_or(p, "coupling", 0.5)};
  } else if (name == "two-spin") {
    model = TwoSpinUnequal{param_or(p, "omega1", 1.0),
                           param_or(p, "omega2", 2.0)};
  } else if (name == "damped-cosine") {
    model = DampedCosine{param_or(p, "gamma", 1.0), param_or(p, "omega", 1.0)};
  } else if (name == "transcendental") {
    model = Transcendental{param_or(p, "gamma", 1.0),
                           param_or(p, "omega", 1.0)};
  } else if (name == "three-channel") {
    model = ThreeChannel{{param_or(p, "a1", 1.0), param_or(p, "a2", 2.0),
                          param_or(p, "a3", 3.0)},
                         {param_or(p, "n1", 4.0), param_or(p, "n2", 4.0),
                          param_or(p, "n3", 4.0)}};
  } else if (name == "jaynes-cummings") {
    model = JaynesCummings{param_or(p, "omega", 1.0)};
  } else if (name == "quasi-periodic") {
    model = QuasiPeriodicThreeSpin{};
  } else {
    throw std::invalid_argument("unknown model: " + name);
  }
  validate(model);
  return model;
}

BlochState parse_initial(const std::string& s) {
  double x, y, z;
  char c1, c2;
  std::istringstream in(s);
  if (!(in >> x >> c1 >> y >> c2 >> z) || c1 != ',' || c2 != ',') {
    throw std::invalid_argument("--initial expects x,y,z");
  }
  BlochState st(x, y, z);
  if (!st.physical(1e-9)) {
    throw std::invalid_argument("--initial lies outside the Bloch ball");
  }
  return st;
}

std::vector<double> uniform_grid(double t_max, double dt) {
  if (t_max <= 0.0) throw std::invalid_argument("--t-max must be positive");
  if (dt <= 0.0) throw std::invalid_argument("--dt must be positive");
  int n = int(std::llround(t_max / dt));
  std::vector<double> grid(size_t(n) + 1);
  for (int i = 0; i <= n; ++i) grid[size_t(i)] = t_max * double(i) / double(n);
  return grid;
}

void cmd_simulate(const ModelSpec& model, const BlochState& init,
                  double t_max, double dt, const std::string& out) {
  Output o(out);
  o.stream() << "t,x,y,z\n";
  for (double t : uniform_grid(t_max, dt)) {
    BlochState s = apply_map(map_at(model, t), init);
    o.stream() << num(t) << ',' << num(s.x()) << ',' << num(s.y()) << ','
               << num(s.z()) << '\n';
  }
}

void print_ode(const ModelSpec& model, const OdeSpec& ode, std::ostream& os) {
  static const char* comp_names[4] = {"const", "x", "y", "z"};
  os << "model = " << model_name(model) << '\n';
  os << "max_order = " << ode.max_order() << '\n';
  for (int c = 0; c < 4; ++c) {
    os << "order_" << comp_names[c] << " = " << ode.order(c) << '\n';
    os << "coeffs_" << comp_names[c] << " =";
    for (double v : ode.comps[size_t(c)]) os << ' ' << num(v);
    os << '\n';
  }
}

void cmd_derive(const ModelSpec& model, const std::string& out) {
  Output o(out);
  print_ode(model, derive_ode(model), o.stream());
}

void cmd_integrate(const ModelSpec& model, const BlochState& init,
                   double t_max, double dt, const std::string& out) {
  OdeSpec ode = derive_ode(model);
  print_ode(model, ode, std::cout);
  std::vector<double> grid = uniform_grid(t_max, dt);
  OdeSolution sol = integrate_ode(
      ode, initial_derivatives(model, init, ode.max_order()), grid);
  Output o(out);
  o.stream() << "t,ode_x,ode_y,ode_z,map_x,map_y,map_z,residual\n";
  double max_resid = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    BlochState exact = apply_map(map_at(model, grid[i]), init);
    double ox = sol.value(1, Eigen::Index(i));
    double oy = sol.value(2, Eigen::Index(i));
    double oz = sol.value(3, Eigen::Index(i));
    double r = std::max({std::abs(ox - exact.x()), std::abs(oy - exact.y()),
                         std::abs(oz - exact.z())});
    max_resid = std::max(max_resid, r);
    o.stream() << num(grid[i]) << ',' << num(ox) << ',' << num(oy) << ','
               << num(oz) << ',' << num(exact.x()) << ',' << num(exact.y())
               << ',' << num(exact.z()) << ',' << num(r) << '\n';
  }
  std::cout << "max_residual = " << num(max_resid) << '\n';
}

void cmd_singularities(const ModelSpec& model, double t_max,
                       const std::string& out) {
  std::vector<double> zs = find_singularities(model, t_max);
  Output o(out);
  o.stream() << "count = " << zs.size() << '\n';
  for (size_t i = 0; i < zs.size(); ++i) {
    o.stream() << "t_" << i << " = " << num(zs[i]) << '\n';
  }
}

void cmd_measure(const ModelSpec& model, std::optional<double> epsilon,
                 bool periodic, double t_max, const std::string& out) {
  MeasureResult res;
  if (periodic) {
    res = measure_rate_periodic(model);
  } else {
    double eps = epsilon ? *epsilon : auto_epsilon(model, t_max);
    double tau = find_tau(model, eps, t_max);
    res = optimal_pair_search(model, tau);
    res.rule = TauRule::Tolerance;
    res.epsilon = eps;
  }
  std::cout << "tau = " << num(res.tau) << '\n'
            << "blp = " << num(res.blp) << '\n'
            << "rate = " << num(res.rate) << '\n'
            << "pair_a = " << num(res.pair_a.x()) << ',' << num(res.pair_a.y())
            << ',' << num(res.pair_a.z()) << '\n'
            << "pair_b = " << num(res.pair_b.x()) << ',' << num(res.pair_b.y())
            << ',' << num(res.pair_b.z()) << '\n'
            << "rule = " << (res.rule == TauRule::Periodic ? "periodic"
                                                           : "tolerance")
            << '\n'
            << (res.rule == TauRule::Periodic ? "period = " : "epsilon = ")
            << num(res.epsilon) << '\n';
  if (!out.empty()) {
    Output o(out);
    o.stream() << "t,norm\n";
    int n = 2000;
    for (int i = 0; i <= n; ++i) {
      double t = res.tau * double(i) / double(n);
      AffineQubitMap e = map_at(model, t);
      double d = trace_distance(apply_map(e, res.pair_a),
                                apply_map(e, res.pair_b));
      o.stream() << num(t) << ',' << num(d) << '\n';
    }
  }
}

void cmd_mutual_info(const ModelSpec& model, const BlochState& init,
                     double t_max, double dt, bool oracle,
                     const std::string& out) {
  const auto* cs = std::get_if<CentralSpin>(&model);
  if (cs == nullptr) {
    throw UnsupportedError("mutual-info requires the central-spin model");
  }
  Eigen::Matrix2cd rho0 = density_from_bloch(init);
  Output o(out);
  o.stream() << "t,I\n";
  for (double t : uniform_grid(t_max, dt)) {
    MutualInfoSample s =
        mutual_information(cs->spins, cs->coupling, rho0, t, oracle);
    o.stream() << num(s.t) << ',' << num(s.value) << '\n';
  }
}

// One trajectory CSV with header t,x,y,z.
std::pair<std::vector<double>, std::vector<BlochState>> read_trajectory(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trajectory: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y,z") {
    throw std::invalid_argument(path + ": expected header t,x,y,z");
  }
  std::vector<double> grid;
  std::vector<BlochState> states;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t, x, y, z;
    char c;
    std::istringstream row(line);
    if (!(row >> t >> c >> x >> c >> y >> c >> z)) {
      throw std::invalid_argument(path + ": malformed row: " + line);
    }
    grid.push_back(t);
    states.emplace_back(x, y, z);
  }
  return {std::move(grid), std::move(states)};
}

void cmd_tomography(const std::vector<std::string>& inputs,
                    const std::optional<ModelSpec>& model, double t_max,
                    double dt, double h, const std::string& out) {
  std::unique_ptr<TrajectoryBundle> bundle;
  std::vector<double> times;
  if (!inputs.empty()) {
    if (inputs.size() != 4) {
      throw std::invalid_argument("tomography expects four trajectory CSVs");
    }
    std::array<std::vector<BlochState>, 4> series;
    std::vector<double> grid;
    for (int i = 0; i < 4; ++i) {
      auto [g, s] = read_trajectory(inputs[size_t(i)]);
      if (i == 0) {
        grid = g;
      } else if (g != grid) {
        throw std::invalid_argument("tomography: input grids differ");
      }
      series[size_t(i)] = std::move(s);
    }
    bundle = std::make_unique<TrajectoryBundle>(grid, std::move(series));
    // Differences over the supplied grid itself, not an interpolated step.
    h = grid[1] - grid[0];
    times.assign(grid.begin() + 1, grid.end() - 1);
  } else if (model) {
    times = uniform_grid(t_max, dt);
  } else {
    throw std::invalid_argument("tomography needs --model or four CSVs");
  }
  Output o(out);
  o.stream() << "t,c11,c22,c33,c12,c13,c23,hx,hy,hz,"
                "rate1,rate2,rate3,cond,residual,flag\n";
  for (double t : times) {
    if (t <= h) continue;
    try {
      GeneratorEstimate est =
          bundle ? estimate_generator(*bundle, t, h)
                 : estimate_generator(*model, t, h);
      auto rates = canonical_rates(est);
      o.stream() << num(t) << ',' << num(est.c(0, 0)) << ','
                 << num(est.c(1, 1)) << ',' << num(est.c(2, 2)) << ','
                 << num(est.c(0, 1)) << ',' << num(est.c(0, 2)) << ','
                 << num(est.c(1, 2)) << ',' << num(est.h[0]) << ','
                 << num(est.h[1]) << ',' << num(est.h[2]) << ','
                 << num(rates[0].rate) << ',' << num(rates[1].rate) << ','
                 << num(rates[2].rate) << ',' << num(est.condition_number)
                 << ',' << num(est.residual) << ",ok\n";
    } catch (const IllConditionedError& e) {
      o.stream() << num(t) << ",nan,nan,nan,nan,nan,nan,nan,nan,nan,"
                 << "nan,nan,nan," << num(e.condition_number)
                 << ",nan,ill-conditioned\n";
    }
  }
}

void cmd_models() {
  for (const ModelSpec& m : catalog_models()) {
    std::cout << model_name(m);
    if (const auto* cs = std::get_if<CentralSpin>(&m)) {
      std::cout << " spins=" << cs->spins
                << " coupling=" << num(cs->coupling);
    } else if (const auto* two = std::get_if<TwoSpinUnequal>(&m)) {
      std::cout << " omega1=" << num(two->omega1)
                << " omega2=" << num(two->omega2);
    } else if (const auto* d = std::get_if<DampedCosine>(&m)) {
      std::cout << " gamma=" << num(d->gamma) << " omega=" << num(d->omega);
    } else if (const auto* tr = std::get_if<Transcendental>(&m)) {
      std::cout << " gamma=" << num(tr->gamma) << " omega=" << num(tr->omega);
    } else if (const auto* th = std::get_if<ThreeChannel>(&m)) {
      std::cout << " a=" << num(th->a[0]) << ',' << num(th->a[1]) << ','
                << num(th->a[2]) << " n=" << num(th->n[0]) << ','
                << num(th->n[1]) << ',' << num(th->n[2]);
    } else if (const auto* jc = std::get_if<JaynesCummings>(&m)) {
      std::cout << " omega=" << num(jc->omega);
    }
    std::cout << '\n';
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-system qubit dynamics with singular generators"};
  app.require_subcommand(1);
  app.set_config("--config");

  std::string model_name_arg = "identity";
  std::vector<std::string> params;
  std::string initial_arg = "0,0,1";
  std::string out_path;
  std::vector<std::string> tomo_inputs;
  double t_max = 10.0, dt = 0.01, h = 1e-6;
  std::optional<double> epsilon;
  bool periodic = false, oracle = false;

  auto add_common = [&](CLI::App* sub, bool with_model = true) {
    if (with_model) {
      sub->add_option("--model", model_name_arg, "catalog model name");
      sub->add_option("--param", params, "model parameter key=value");
    }
    sub->add_option("--out", out_path, "output path (default stdout)");
  };

  auto* sim = app.add_subcommand("simulate", "trajectory CSV t,x,y,z");
  add_common(sim);
  sim->add_option("--t-max", t_max);
  sim->add_option("--dt", dt);
  sim->add_option("--initial", initial_arg, "Bloch vector x,y,z");

  auto* der = app.add_subcommand("derive", "higher-order equation report");
  add_common(der);

  auto* integ = app.add_subcommand(
      "integrate", "integrate the derived equation, compare with the map");
  add_common(integ);
  integ->add_option("--t-max", t_max);
  integ->add_option("--dt", dt);
  integ->add_option("--initial", initial_arg);

  auto* sing = app.add_subcommand("singularities", "map-singularity times");
  add_common(sing);
  sing->add_option("--t-max", t_max);

  auto* meas = app.add_subcommand("measure", "inflow-rate measure report");
  add_common(meas);
  meas->add_option("--t-max", t_max);
  meas->add_option("--epsilon", epsilon, "return tolerance for tau");
  meas->add_flag("--periodic", periodic, "use the exact-period rule");

  auto* mi = app.add_subcommand("mutual-info", "CSV t,I for central spin");
  add_common(mi);
  mi->add_option("--t-max", t_max);
  mi->add_option("--dt", dt);
  mi->add_option("--initial", initial_arg);
  mi->add_flag("--oracle", oracle, "exact joint-state path (spins <= 10)");

  auto* tomo = app.add_subcommand("tomography",
                                  "generator reconstruction per time");
  add_common(tomo);
  tomo->add_option("inputs", tomo_inputs, "four trajectory CSVs")
      ->expected(0, 4);
  tomo->add_option("--t-max", t_max);
  tomo->add_option("--dt", dt);
  tomo->add_option("--step", h, "finite-difference step");

  auto* mdl = app.add_subcommand("models", "list the model catalog");
  add_common(mdl, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1; // usage/validation errors exit with 1
  }

  try {
    if (mdl->parsed()) {
      cmd_models();
      return 0;
    }
    ModelSpec model = build_model(model_name_arg, params);
    if (sim->parsed()) {
      cmd_simulate(model, parse_initial(initial_arg), t_max, dt, out_path);
    } else if (der->parsed()) {
      cmd_derive(model, out_path);
    } else if (integ->parsed()) {
      cmd_integrate(model, parse_initial(initial_arg), t_max, dt, out_path);
    } else if (sing->parsed()) {
      cmd_singularities(model, t_max, out_path);
    } else if (meas->parsed()) {
      cmd_measure(model, epsilon, periodic, t_max, out_path);
    } else if (mi->parsed()) {
      cmd_mutual_info(model, parse_initial(initial_arg), t_max, dt, oracle,
                      out_path);
    } else if (tomo->parsed()) {
      std::optional<ModelSpec> m;
      if (tomo->count("--model") > 0) m = model;
      cmd_tomography(tomo_inputs, m, t_max, dt, h, out_path);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
