// Experiment runner around the dpp library: exact samplers, flat-limit
// descriptors, convergence sweeps, phase-diagram tables, and random-forest
// root processes.  Emits CSV/JSON artifacts only.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dpp/serialize.hpp"

using dpp::GroundSet;
using dpp::Json;
using dpp::KernelSpec;
using dpp::Matrix;
using dpp::NNP;
using dpp::ProcessDescriptor;
using dpp::ProcessTag;
using dpp::Sample;
using dpp::SymMatrix;
using dpp::Vector;

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---- config file merging ------------------------------------------------

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw dpp::ValidationError("config: cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw dpp::ValidationError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw dpp::ValidationError("config: expected a JSON object");
  return j;
}

// command-line flags win; config values fill options the user left unset
template <typename T>
void merge(const Json& cfg, const CLI::App* sub, const std::string& key, T& var) {
  if (!cfg.contains(key)) return;
  if (sub->get_option("--" + key)->count() > 0) return;
  try {
    var = cfg.at(key).get<T>();
  } catch (const std::exception&) {
    throw dpp::ValidationError("config: bad value for \"" + key + "\"");
  }
}

// ---- ground-set plumbing --------------------------------------------------

struct GroundOpts {
  std::string points_file;
  int random_n = 0;
  int dim = 1;
  std::uint64_t gs_seed = 12345;
  int grid_n = 0;
};

void add_ground_options(CLI::App* sub, GroundOpts& g) {
  sub->add_option("--points", g.points_file,
                  "points file: one point per row, whitespace separated");
  sub->add_option("--random-points", g.random_n, "draw this many uniform points");
  sub->add_option("--dim", g.dim, "dimension for --random-points (default 1)");
  sub->add_option("--gs-seed", g.gs_seed, "seed for --random-points");
  sub->add_option("--grid", g.grid_n, "equispaced univariate grid on [0,1]");
}

void merge_ground(const Json& cfg, const CLI::App* sub, GroundOpts& g) {
  merge(cfg, sub, "points", g.points_file);
  merge(cfg, sub, "random-points", g.random_n);
  merge(cfg, sub, "dim", g.dim);
  merge(cfg, sub, "gs-seed", g.gs_seed);
  merge(cfg, sub, "grid", g.grid_n);
}

GroundSet build_ground_set(const GroundOpts& g) {
  int sources = (!g.points_file.empty() ? 1 : 0) + (g.random_n > 0 ? 1 : 0) +
                (g.grid_n > 0 ? 1 : 0);
  if (sources != 1)
    throw dpp::ValidationError(
        "ground set: choose exactly one of --points, --random-points, --grid");
  if (!g.points_file.empty()) {
    std::ifstream in(g.points_file);
    if (!in) throw dpp::ValidationError("ground set: cannot open " + g.points_file);
    return GroundSet(dpp::read_points(in));
  }
  if (g.grid_n > 0) {
    if (g.grid_n < 2) throw dpp::ValidationError("ground set: --grid needs at least 2");
    Matrix pts(g.grid_n, 1);
    for (int i = 0; i < g.grid_n; ++i) pts(i, 0) = double(i) / (g.grid_n - 1);
    return GroundSet(pts);
  }
  if (g.dim < 1) throw dpp::ValidationError("ground set: --dim must be positive");
  dpp::RngState rng(g.gs_seed);
  Matrix pts(g.random_n, g.dim);
  for (int i = 0; i < g.random_n; ++i)
    for (int j = 0; j < g.dim; ++j) pts(i, j) = rng.uniform();
  return GroundSet(pts);
}

// writes to the named file, or stdout for "-"
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw dpp::ValidationError("cannot open output file " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string point_label(const GroundSet& gs, int i) {
  std::string out;
  for (int j = 0; j < gs.d(); ++j) {
    if (j) out += ";";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", gs.points(i, j));
    out += buf;
  }
  return out;
}

std::string support_string(const Vector& law, double thresh) {
  std::string out;
  for (int s = 0; s < law.size(); ++s)
    if (law(s) >= thresh) {
      if (!out.empty()) out += ";";
      out += std::to_string(s);
    }
  return out;
}

// ---- sample ---------------------------------------------------------------

struct SampleOpts {
  std::string config, nnp_file, kernel, limit_mode, out = "-";
  double eps = 0.0, alpha = 1.0;
  int m = -1, power = -1, draws = 100;
  long long seed = -1;
  GroundOpts ground;
};

int run_sample(const CLI::App* sub, SampleOpts& o) {
  Json cfg = load_config(o.config);
  merge(cfg, sub, "nnp", o.nnp_file);
  merge(cfg, sub, "kernel", o.kernel);
  merge(cfg, sub, "limit", o.limit_mode);
  merge(cfg, sub, "eps", o.eps);
  merge(cfg, sub, "alpha", o.alpha);
  merge(cfg, sub, "m", o.m);
  merge(cfg, sub, "power", o.power);
  merge(cfg, sub, "draws", o.draws);
  merge(cfg, sub, "seed", o.seed);
  merge(cfg, sub, "out", o.out);
  merge_ground(cfg, sub, o.ground);

  if (o.seed < 0) throw dpp::ValidationError("sample: --seed is required");
  if (o.draws < 1) throw dpp::ValidationError("sample: --draws must be positive");

  // the draw function abstracts over the three sources
  std::function<Sample(dpp::RngState&)> draw;
  if (!o.nnp_file.empty()) {
    if (!o.kernel.empty())
      throw dpp::ValidationError("sample: --nnp and --kernel are exclusive");
    std::ifstream in(o.nnp_file);
    if (!in) throw dpp::ValidationError("sample: cannot open " + o.nnp_file);
    Json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw dpp::ValidationError(std::string("sample: nnp json: ") + e.what());
    }
    NNP nnp = dpp::nnp_from_json(j);
    int m = o.m;
    draw = [nnp, m](dpp::RngState& rng) {
      return m >= 0 ? dpp::sample_fixed_dpp(nnp, m, rng) : dpp::sample_dpp(nnp, rng);
    };
  } else if (!o.kernel.empty()) {
    KernelSpec k = dpp::kernel_by_name(o.kernel);
    GroundSet gs = build_ground_set(o.ground);
    if (o.limit_mode == "fixed") {
      if (o.m < 1) throw dpp::ValidationError("sample: --limit fixed needs --m");
      ProcessDescriptor desc = dpp::fixed_limit(k, gs, o.m);
      draw = [desc](dpp::RngState& rng) { return dpp::sample_descriptor(desc, rng); };
    } else if (o.limit_mode == "varying") {
      if (o.power < 0) throw dpp::ValidationError("sample: --limit varying needs --power");
      ProcessDescriptor desc =
          dpp::varying_limit(k, gs, dpp::make_phase(k, gs, o.power, o.alpha));
      draw = [desc](dpp::RngState& rng) { return dpp::sample_descriptor(desc, rng); };
    } else if (o.limit_mode.empty()) {
      if (o.eps <= 0.0)
        throw dpp::ValidationError("sample: kernel source needs --eps > 0");
      NNP nnp = dpp::make_nnp(dpp::kernel_matrix(k, gs, o.eps), Matrix(gs.n(), 0));
      int m = o.m;
      draw = [nnp, m](dpp::RngState& rng) {
        return m >= 0 ? dpp::sample_fixed_dpp(nnp, m, rng) : dpp::sample_dpp(nnp, rng);
      };
    } else {
      throw dpp::ValidationError("sample: --limit must be \"fixed\" or \"varying\"");
    }
  } else {
    throw dpp::ValidationError("sample: need a source (--nnp or --kernel)");
  }

  OutStream out(o.out);
  out.get() << "draw_id,indices\n";
  dpp::RngState rng(static_cast<std::uint64_t>(o.seed));
  for (int id = 0; id < o.draws; ++id) {
    Sample s = draw(rng);
    out.get() << id << ",";
    for (size_t j = 0; j < s.size(); ++j) {
      if (j) out.get() << " ";
      out.get() << s[j];
    }
    out.get() << "\n";
  }
  return 0;
}

// ---- limit ----------------------------------------------------------------

struct LimitOpts {
  std::string config, kernel, out = "-";
  int m = -1, power = -1;
  double alpha = 1.0;
  GroundOpts ground;
};

int run_limit(const CLI::App* sub, LimitOpts& o) {
  Json cfg = load_config(o.config);
  merge(cfg, sub, "kernel", o.kernel);
  merge(cfg, sub, "m", o.m);
  merge(cfg, sub, "power", o.power);
  merge(cfg, sub, "alpha", o.alpha);
  merge(cfg, sub, "out", o.out);
  merge_ground(cfg, sub, o.ground);

  if (o.kernel.empty()) throw dpp::ValidationError("limit: --kernel is required");
  if ((o.m >= 0) == (o.power >= 0))
    throw dpp::ValidationError("limit: give exactly one of --m or --power");
  KernelSpec k = dpp::kernel_by_name(o.kernel);
  GroundSet gs = build_ground_set(o.ground);
  ProcessDescriptor desc =
      o.m >= 0 ? dpp::fixed_limit(k, gs, o.m)
               : dpp::varying_limit(k, gs, dpp::make_phase(k, gs, o.power, o.alpha));
  OutStream out(o.out);
  out.get() << dpp::descriptor_to_json(desc).dump(2) << "\n";
  return 0;
}

// ---- converge ---------------------------------------------------------------

struct ConvergeOpts {
  std::string config, kernel, out;
  int m = -1;
  std::vector<double> eps_list;
  std::vector<double> cond;
  GroundOpts ground;
};

int run_converge(const CLI::App* sub, ConvergeOpts& o) {
  Json cfg = load_config(o.config);
  merge(cfg, sub, "kernel", o.kernel);
  merge(cfg, sub, "m", o.m);
  merge(cfg, sub, "eps-list", o.eps_list);
  merge(cfg, sub, "cond", o.cond);
  merge(cfg, sub, "out", o.out);
  merge_ground(cfg, sub, o.ground);

  if (o.kernel.empty()) throw dpp::ValidationError("converge: --kernel is required");
  if (o.m < 1) throw dpp::ValidationError("converge: --m is required");
  if (o.out.empty()) throw dpp::ValidationError("converge: --out prefix is required");
  if (o.eps_list.empty()) o.eps_list = {4.0, 1.5, 0.5, 0.1};
  for (double e : o.eps_list)
    if (e <= 0.0) throw dpp::ValidationError("converge: eps values must be positive");

  KernelSpec k = dpp::kernel_by_name(o.kernel);
  GroundSet base = build_ground_set(o.ground);
  int d = base.d();

  // conditioning points are appended to the ground set unless already present
  std::vector<int> ymask_idx;
  Matrix pts = base.points;
  if (!o.cond.empty()) {
    if (static_cast<int>(o.cond.size()) % d != 0)
      throw dpp::ValidationError("converge: --cond length must be a multiple of the dimension");
    int ny = static_cast<int>(o.cond.size()) / d;
    for (int a = 0; a < ny; ++a) {
      Eigen::RowVectorXd row(d);
      for (int j = 0; j < d; ++j) row(j) = o.cond[a * d + j];
      int found = -1;
      for (int i = 0; i < pts.rows(); ++i)
        if ((pts.row(i) - row).norm() == 0.0) found = i;
      if (found < 0) {
        pts.conservativeResize(pts.rows() + 1, Eigen::NoChange);
        pts.row(pts.rows() - 1) = row;
        found = static_cast<int>(pts.rows()) - 1;
      }
      ymask_idx.push_back(found);
    }
    if (static_cast<int>(ymask_idx.size()) != o.m - 1)
      throw dpp::ValidationError(
          "converge: --cond must supply exactly m-1 conditioning points");
  }
  GroundSet gs(pts);
  int n = gs.n();
  uint32_t ymask = 0;
  for (int i : ymask_idx) ymask |= uint32_t(1) << i;

  ProcessDescriptor desc = dpp::fixed_limit(k, gs, o.m);
  dpp::PmfTable limit = dpp::enumerate_descriptor(desc);

  std::vector<dpp::PmfTable> tables;
  for (double eps : o.eps_list)
    tables.push_back(
        dpp::enumerate_pmf_scaled_ext(dpp::kernel_matrix_ext(k, gs, eps), 0.0, o.m));

  {
    OutStream tv(o.out + "_tv.csv");
    tv.get() << "eps,tv\n";
    for (size_t e = 0; e < tables.size(); ++e)
      tv.get() << fmt(o.eps_list[e]) << "," << fmt(dpp::tv_distance(tables[e], limit))
               << "\n";
  }

  {
    OutStream incl(o.out + "_incl.csv");
    incl.get() << "eps";
    for (int i = 0; i < n; ++i) incl.get() << "," << point_label(gs, i);
    incl.get() << "\n";
    auto row = [&](const std::string& label, const dpp::PmfTable& t) {
      incl.get() << label;
      for (int i = 0; i < n; ++i)
        incl.get() << "," << fmt(dpp::inclusion_prob(t, uint32_t(1) << i));
      incl.get() << "\n";
    };
    for (size_t e = 0; e < tables.size(); ++e) row(fmt(o.eps_list[e]), tables[e]);
    row("limit", limit);
  }

  if (!ymask_idx.empty()) {
    // density of the one remaining point given the conditioning set
    std::vector<int> grid;
    for (int i = 0; i < n; ++i)
      if (!(ymask & (uint32_t(1) << i))) grid.push_back(i);
    OutStream cond(o.out + "_cond.csv");
    cond.get() << "eps";
    for (int i : grid) cond.get() << "," << point_label(gs, i);
    cond.get() << "\n";
    auto row = [&](const std::string& label, const dpp::PmfTable& t) {
      std::vector<double> w(grid.size());
      double total = 0.0;
      for (size_t a = 0; a < grid.size(); ++a) {
        w[a] = t.prob(ymask | (uint32_t(1) << grid[a]));
        total += w[a];
      }
      if (total <= 0.0)
        throw dpp::NumericalError("converge: conditioning set has zero mass");
      cond.get() << label;
      for (double v : w) cond.get() << "," << fmt(v / total);
      cond.get() << "\n";
    };
    for (size_t e = 0; e < tables.size(); ++e) row(fmt(o.eps_list[e]), tables[e]);
    row("limit", limit);
  }
  return 0;
}

// ---- phase ------------------------------------------------------------------

struct PhaseOpts {
  std::string config, kernel, out = "-";
  double alpha = 1.0, eps = 1e-3;
  int max_power = -1;
  GroundOpts ground;
};

int run_phase(const CLI::App* sub, PhaseOpts& o) {
  Json cfg = load_config(o.config);
  merge(cfg, sub, "kernel", o.kernel);
  merge(cfg, sub, "alpha", o.alpha);
  merge(cfg, sub, "eps", o.eps);
  merge(cfg, sub, "max-power", o.max_power);
  merge(cfg, sub, "out", o.out);
  merge_ground(cfg, sub, o.ground);

  if (o.kernel.empty()) throw dpp::ValidationError("phase: --kernel is required");
  if (o.eps <= 0.0) throw dpp::ValidationError("phase: --eps must be positive");
  KernelSpec k = dpp::kernel_by_name(o.kernel);
  GroundSet gs = build_ground_set(o.ground);
  if (o.max_power < 0) o.max_power = 2 * gs.n();

  const double kSupportThresh = 0.01;
  OutStream out(o.out);
  out.get() << "scale_power,r,regime,predicted_support,observed_support\n";
  std::string rlabel = k.finite_r() ? std::to_string(k.r) : "inf";
  for (int p = 0; p <= o.max_power; ++p) {
    ProcessDescriptor desc = dpp::varying_limit(k, gs, dpp::make_phase(k, gs, p, o.alpha));
    std::string predicted = support_string(dpp::descriptor_size_law(desc), kSupportThresh);
    std::string observed;
    try {
      double log_scale = std::log(o.alpha) - p * std::log(o.eps);
      dpp::PmfTable t =
          dpp::enumerate_pmf_scaled_ext(dpp::kernel_matrix_ext(k, gs, o.eps), log_scale);
      observed = support_string(dpp::size_distribution(t), kSupportThresh);
    } catch (const dpp::NumericalError&) {
      // flat kernel minors for this scale power fall below even extended
      // roundoff; report the row as unresolved rather than guessing
      observed = "unresolved";
    }
    out.get() << p << "," << rlabel << "," << dpp::tag_name(desc.tag) << ","
              << predicted << "," << observed << "\n";
  }
  return 0;
}

// ---- forest -----------------------------------------------------------------

struct ForestOpts {
  std::string config, graph, out = "-";
  double q = 0.0;
  int draws = 100000;
  long long seed = -1;
};

int run_forest(const CLI::App* sub, ForestOpts& o) {
  Json cfg = load_config(o.config);
  merge(cfg, sub, "graph", o.graph);
  merge(cfg, sub, "q", o.q);
  merge(cfg, sub, "draws", o.draws);
  merge(cfg, sub, "seed", o.seed);
  merge(cfg, sub, "out", o.out);

  if (o.graph.empty()) throw dpp::ValidationError("forest: --graph is required");
  if (o.seed < 0) throw dpp::ValidationError("forest: --seed is required");
  if (o.draws < 1) throw dpp::ValidationError("forest: --draws must be positive");
  std::ifstream in(o.graph);
  if (!in) throw dpp::ValidationError("forest: cannot open " + o.graph);
  dpp::Graph g = dpp::read_edge_list(in);
  SymMatrix kernel = dpp::forest_root_kernel(g, o.q);

  std::vector<long> hits(g.n, 0);
  int min_roots = g.n;
  dpp::RngState rng(static_cast<std::uint64_t>(o.seed));
  for (int it = 0; it < o.draws; ++it) {
    Sample roots = dpp::wilson_forest_roots(g, o.q, rng);
    min_roots = std::min(min_roots, static_cast<int>(roots.size()));
    for (int v : roots) ++hits[v];
  }

  double max_dev = 0.0, bound = 0.0;
  Json emp = Json::array(), theo = Json::array();
  for (int v = 0; v < g.n; ++v) {
    double p = kernel.mat()(v, v);
    double f = double(hits[v]) / o.draws;
    emp.push_back(f);
    theo.push_back(p);
    max_dev = std::max(max_dev, std::abs(f - p));
    bound = std::max(bound, 3.0 * std::sqrt(p * (1.0 - p) / o.draws));
  }

  Json report;
  report["n"] = g.n;
  report["q"] = o.q;
  report["draws"] = o.draws;
  report["seed"] = o.seed;
  report["empirical_root_marginals"] = emp;
  report["theoretical_root_marginals"] = theo;
  report["max_abs_deviation"] = max_dev;
  report["three_sigma_bound"] = bound;
  report["within_bound"] = max_dev <= bound;
  report["min_root_count"] = min_roots;
  OutStream out(o.out);
  out.get() << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"determinantal point process toolkit"};
  app.require_subcommand(1);

  SampleOpts so;
  CLI::App* sample = app.add_subcommand("sample", "draw subsets and write a CSV");
  sample->add_option("--config", so.config, "JSON config; flags override");
  sample->add_option("--nnp", so.nnp_file, "load a (L, V) pair from JSON");
  sample->add_option("--kernel", so.kernel, "builtin kernel name");
  sample->add_option("--eps", so.eps, "kernel length-scale parameter");
  sample->add_option("--limit", so.limit_mode, "sample the limit: fixed | varying");
  sample->add_option("--m", so.m, "fixed sample size");
  sample->add_option("--power", so.power, "scale power for --limit varying");
  sample->add_option("--alpha", so.alpha, "scale prefactor for --limit varying");
  sample->add_option("--draws", so.draws, "number of samples");
  sample->add_option("--seed", so.seed, "RNG seed (required)");
  sample->add_option("--out", so.out, "output CSV path, - for stdout");
  add_ground_options(sample, so.ground);

  LimitOpts lo;
  CLI::App* limit = app.add_subcommand("limit", "print the limiting process as JSON");
  limit->add_option("--config", lo.config, "JSON config; flags override");
  limit->add_option("--kernel", lo.kernel, "builtin kernel name");
  limit->add_option("--m", lo.m, "fixed sample size");
  limit->add_option("--power", lo.power, "scale power for the varying-size limit");
  limit->add_option("--alpha", lo.alpha, "scale prefactor");
  limit->add_option("--out", lo.out, "output path, - for stdout");
  add_ground_options(limit, lo.ground);

  ConvergeOpts co;
  CLI::App* converge =
      app.add_subcommand("converge", "sweep eps and compare with the limit");
  converge->add_option("--config", co.config, "JSON config; flags override");
  converge->add_option("--kernel", co.kernel, "builtin kernel name");
  converge->add_option("--m", co.m, "fixed sample size");
  converge->add_option("--eps-list", co.eps_list, "eps sweep values")->expected(-1);
  converge->add_option("--cond", co.cond,
                       "m-1 conditioning point coordinates for the density table")
      ->expected(-1);
  converge->add_option("--out", co.out, "output prefix for _tv/_incl/_cond CSVs");
  add_ground_options(converge, co.ground);

  PhaseOpts po;
  CLI::App* phase = app.add_subcommand("phase", "size-law table over scale powers");
  phase->add_option("--config", po.config, "JSON config; flags override");
  phase->add_option("--kernel", po.kernel, "builtin kernel name");
  phase->add_option("--alpha", po.alpha, "scale prefactor");
  phase->add_option("--eps", po.eps, "enumeration eps for the observed column");
  phase->add_option("--max-power", po.max_power, "largest scale power (default 2n)");
  phase->add_option("--out", po.out, "output CSV path, - for stdout");
  add_ground_options(phase, po.ground);

  ForestOpts fo;
  CLI::App* forest =
      app.add_subcommand("forest", "random-forest root process on a graph");
  forest->add_option("--config", fo.config, "JSON config; flags override");
  forest->add_option("--graph", fo.graph, "edge list file: u v weight");
  forest->add_option("--q", fo.q, "root intensity q > 0");
  forest->add_option("--draws", fo.draws, "number of forests");
  forest->add_option("--seed", fo.seed, "RNG seed (required)");
  forest->add_option("--out", fo.out, "output JSON path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sample->parsed()) return run_sample(sample, so);
    if (limit->parsed()) return run_limit(limit, lo);
    if (converge->parsed()) return run_converge(converge, co);
    if (phase->parsed()) return run_phase(phase, po);
    if (forest->parsed()) return run_forest(forest, fo);
  } catch (const dpp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dpp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
