// heatgeo: command-line front end for the heat-method geodesic toolkit.
//
// Exit codes: 0 success, 1 invalid input (arguments, files, meshes, sources),
// 2 numerical failure (factorization or singular exact system).

#include "heatgeo/cholesky.hpp"
#include "heatgeo/heat.hpp"
#include "heatgeo/mesh.hpp"
#include "heatgeo/oracle.hpp"
#include "heatgeo/varadhan.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

using namespace heatgeo;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("invalid " + what + " '" + s + "'");
  }
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("invalid " + what + " '" + s + "'");
  }
}

// "icosphere:K", "grid:N[:spacing]", "perturbed-grid:N:noise[:seed]", "torus:R:r:nu:nv"
TriangleMesh generated_mesh(const std::string& spec) {
  const auto p = split(spec, ':');
  if (p.empty()) throw InputError("empty mesh generator spec");
  const std::string& kind = p[0];
  auto arg = [&](std::size_t i) -> const std::string& {
    if (i >= p.size()) throw InputError("mesh generator spec '" + spec + "' is missing arguments");
    return p[i];
  };
  if (kind == "icosphere") return make_icosphere(to_int(arg(1), "subdivision level"));
  if (kind == "grid") {
    const int n = to_int(arg(1), "grid size");
    return make_grid(n, n, p.size() > 2 ? to_double(p[2], "spacing") : 1.0);
  }
  if (kind == "perturbed-grid") {
    const int n = to_int(arg(1), "grid size");
    const auto seed = p.size() > 3 ? static_cast<unsigned long long>(to_int(p[3], "seed")) : 1ULL;
    return make_perturbed_grid(n, n, 1.0, to_double(arg(2), "noise"), seed);
  }
  if (kind == "torus") {
    return make_torus(to_double(arg(1), "major radius"), to_double(arg(2), "minor radius"),
                      to_int(arg(3), "nu"), to_int(arg(4), "nv"));
  }
  throw InputError("unknown mesh generator '" + kind + "'");
}

TriangleMesh input_mesh(const std::string& path, const std::string& generate) {
  if (!path.empty() && !generate.empty()) throw InputError("--in and --generate are mutually exclusive");
  if (!generate.empty()) return generated_mesh(generate);
  if (path.empty()) throw InputError("a mesh is required (--in FILE or --generate SPEC)");
  return load_mesh(path);
}

std::vector<int> parse_source_list(const std::string& spec) {
  std::string text = spec;
  if (!spec.empty() && spec[0] == '@') {
    std::ifstream in(spec.substr(1));
    if (!in) throw InputError("cannot open source file '" + spec.substr(1) + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    std::replace_if(text.begin(), text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }, ',');
  }
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    if (!item.empty()) out.push_back(to_int(item, "source vertex"));
  }
  return out;
}

std::ostream& precise(std::ostream& out) {
  return out << std::setprecision(17);
}

// Writes to `path`, or stdout when empty.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    precise(std::cout);
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  precise(out);
  write(out);
  if (!out) throw InputError("failed writing '" + path + "'");
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < std::min(threads, count); ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct MeshArgs {
  std::string in;
  std::string generate;
};

void add_mesh_options(CLI::App* cmd, MeshArgs& args) {
  cmd->add_option("--in", args.in, "Input mesh (.obj or .ply)");
  cmd->add_option("--generate", args.generate,
                  "Generated mesh: icosphere:K, grid:N[:spacing], perturbed-grid:N:noise[:seed], torus:R:r:nu:nv");
}

struct ComputeArgs {
  MeshArgs mesh;
  std::string sources;
  std::string nearest;
  double m = 1.0;
  std::string bc = "neumann";
  std::string out;
  std::string format = "csv";
};

int run_compute(const ComputeArgs& a) {
  const TriangleMesh mesh = input_mesh(a.mesh.in, a.mesh.generate);
  std::vector<int> sources = parse_source_list(a.sources);
  if (!a.nearest.empty()) {
    const auto xyz = split(a.nearest, ',');
    if (xyz.size() != 3) throw InputError("--nearest expects x,y,z");
    const Eigen::Vector3d p(to_double(xyz[0], "x"), to_double(xyz[1], "y"), to_double(xyz[2], "z"));
    const int v = nearest_vertex(mesh, p);
    std::clog << "heatgeo: nearest vertex to (" << a.nearest << ") is " << v << "\n";
    sources.push_back(v);
  }
  if (sources.empty()) throw InputError("at least one source is required (--source or --nearest)");
  const SourceSet set(sources, mesh.num_vertices());

  const HeatOptions options{.time_multiplier = a.m, .boundary = parse_boundary_condition(a.bc)};
  const auto start = Clock::now();
  const HeatGeodesicSolver solver(mesh, options);
  std::clog << "heatgeo: " << mesh.num_vertices() << " vertices, " << mesh.num_faces() << " faces, t = " << solver.time_step()
            << ", " << solver.factor_count() << " factorizations in " << seconds_since(start) << " s\n";
  const VertexScalarField phi = solver.geodesic_distance(set);
  if (!phi.allFinite()) throw NumericalError("distance field contains non-finite values");

  if (a.format == "csv") {
    emit(a.out, [&](std::ostream& out) {
      out << "vertex_index,distance\n";
      for (int v = 0; v < mesh.num_vertices(); ++v) out << v << ',' << phi[v] << '\n';
    });
  } else if (a.format == "ply_scalar") {
    emit(a.out, [&](std::ostream& out) { write_ply_with_scalar(out, mesh, phi, "distance"); });
  } else {
    throw InputError("unknown format '" + a.format + "' (expected csv or ply_scalar)");
  }
  return 0;
}

struct BenchArgs {
  MeshArgs mesh;
  int queries = 10;
  double m = 1.0;
  unsigned long long seed = 1;
  int threads = 1;
  std::string out;
};

int run_bench(const BenchArgs& a) {
  if (a.queries < 2) throw InputError("bench needs at least 2 queries");
  const TriangleMesh mesh = input_mesh(a.mesh.in, a.mesh.generate);

  const auto build_start = Clock::now();
  const HeatGeodesicSolver solver(mesh, HeatOptions{.time_multiplier = a.m});
  const double build = seconds_since(build_start);

  std::mt19937_64 rng(a.seed);
  std::uniform_int_distribution<int> pick(0, mesh.num_vertices() - 1);
  std::vector<int> sources(static_cast<std::size_t>(a.queries));
  for (auto& s : sources) s = pick(rng);

  solver.geodesic_distance(SourceSet({sources[0]}, mesh.num_vertices()));  // warmup, discarded
  const auto factorizations_before = instrumentation::factorizations();
  std::vector<double> times(sources.size());
  const auto wall_start = Clock::now();
  parallel_for(a.queries, a.threads, [&](int i) {
    const auto start = Clock::now();
    solver.geodesic_distance(SourceSet({sources[static_cast<std::size_t>(i)]}, mesh.num_vertices()));
    times[static_cast<std::size_t>(i)] = seconds_since(start);
  });
  const double wall = seconds_since(wall_start);
  const auto query_factorizations = instrumentation::factorizations() - factorizations_before;

  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  const double median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  emit(a.out, [&](std::ostream& out) {
    out << "vertices,faces,queries,threads,build_seconds,median_query_seconds,query_wall_seconds,speedup,"
           "query_factorizations\n";
    out << mesh.num_vertices() << ',' << mesh.num_faces() << ',' << a.queries << ',' << a.threads << ',' << build << ','
        << median << ',' << wall << ',' << build / median << ',' << query_factorizations << '\n';
  });
  if (query_factorizations != 0) throw NumericalError("queries triggered factorizations");
  return 0;
}

struct ConvergenceArgs {
  std::string family = "icosphere";
  std::vector<int> levels;
  double m = 1.0;
  int threads = 1;
  std::string out;
};

int run_convergence(const ConvergenceArgs& a) {
  const MeshFamily family = parse_mesh_family(a.family);
  std::vector<int> levels = a.levels;
  if (levels.empty()) levels = family == MeshFamily::icosphere ? std::vector<int>{2, 3, 4} : std::vector<int>{16, 32, 64};

  // Levels are independent; run them one per worker and stitch the orders afterwards.
  std::vector<ConvergenceRow> rows(levels.size());
  parallel_for(static_cast<int>(levels.size()), a.threads, [&](int i) {
    rows[static_cast<std::size_t>(i)] = convergence_study(family, {levels[static_cast<std::size_t>(i)]}, a.m).front();
  });
  for (std::size_t k = 1; k < rows.size(); ++k) {
    rows[k].observed_order =
        std::log(rows[k - 1].linf_error / rows[k].linf_error) / std::log(rows[k - 1].h / rows[k].h);
  }

  emit(a.out, [&](std::ostream& out) {
    out << "family,level,h,linf_error,mean_relative_error,observed_order\n";
    for (const auto& r : rows) {
      out << to_string(family) << ',' << r.level << ',' << r.h << ',' << r.linf_error << ',' << r.mean_relative_error << ',';
      if (r.observed_order) out << *r.observed_order;
      out << '\n';
    }
  });
  return 0;
}

struct VaradhanArgs {
  int grid = 8;
  std::vector<int> exponents{6, 8};
  int source = -1;
  bool laplacian = false;
  std::string out;
};

constexpr int max_exact_grid = 10;

int run_varadhan(const VaradhanArgs& a) {
  if (a.grid < 1) throw InputError("grid size must be positive");
  if (a.grid > max_exact_grid) {
    throw InputError("grid size " + std::to_string(a.grid) + " exceeds the exact-arithmetic budget (max " +
                     std::to_string(max_exact_grid) + ")");
  }
  if (a.exponents.empty()) throw InputError("at least one t exponent is required");
  const IntegerMatrix A = a.laplacian ? grid_laplacian(a.grid, a.grid) : grid_adjacency(a.grid, a.grid);
  const int n = static_cast<int>(A.rows());
  const int source = a.source >= 0 ? a.source : (a.grid / 2) * a.grid + a.grid / 2;
  if (source >= n) throw InputError("source vertex out of range");

  std::vector<Rational> ts;
  for (int k : a.exponents) ts.push_back(inverse_power_of_ten(k));
  const auto exponent = varadhan_exponent(A, source, ts);
  const auto bfs = bfs_distance(A, source);

  for (std::size_t k = 0; k < ts.size(); ++k) {
    double worst = 0;
    for (int v = 0; v < n; ++v) worst = std::max(worst, std::abs(exponent[k][static_cast<std::size_t>(v)] - bfs[static_cast<std::size_t>(v)]));
    std::clog << "heatgeo: t = 1e-" << a.exponents[k] << ": max |log u / log t - bfs| = " << worst << "\n";
  }

  emit(a.out, [&](std::ostream& out) {
    out << "vertex_index,bfs";
    for (int k : a.exponents) out << ",exponent_t1e-" << k;
    out << '\n';
    for (int v = 0; v < n; ++v) {
      out << v << ',' << bfs[static_cast<std::size_t>(v)];
      for (const auto& row : exponent) out << ',' << row[static_cast<std::size_t>(v)];
      out << '\n';
    }
  });
  return 0;
}

struct MetricArgs {
  std::string family = "icosphere";
  int level = 3;
  std::vector<double> m;
  int sources = 20;
  int pairs = 50;
  int triples = 200;
  unsigned long long seed = 1;
  std::string out;
};

int run_metric(const MetricArgs& a) {
  const StudyMesh study = make_study_mesh(parse_mesh_family(a.family), a.level);
  const TriangleMesh& mesh = study.mesh;
  const std::vector<double> ms = a.m.empty() ? std::vector<double>{1.0} : a.m;
  if (a.sources < 2 || a.sources > mesh.num_vertices()) throw InputError("--sources must be in [2, vertex count]");

  std::mt19937_64 rng(a.seed);
  std::vector<int> all(static_cast<std::size_t>(mesh.num_vertices()));
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(a.sources));

  emit(a.out, [&](std::ostream& out) {
    out << "m,max_symmetry_percent,max_triangle_percent,pairs,triples,violating_triples\n";
    for (double m : ms) {
      const HeatGeodesicSolver solver(mesh, HeatOptions{.time_multiplier = m});
      std::map<int, VertexScalarField> fields;
      for (int s : all) fields[s] = solver.geodesic_distance(SourceSet({s}, mesh.num_vertices()));
      const auto r = metric_violation_scan(fields, mesh.diameter(), {.pairs = a.pairs, .triples = a.triples, .seed = a.seed});
      out << m << ',' << 100 * r.max_symmetry << ',' << 100 * r.max_triangle << ',' << r.pairs_checked << ','
          << r.triples_checked << ',' << r.violating_triples.size() << '\n';
    }
  });
  return 0;
}

struct GenerateArgs {
  std::string spec;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const TriangleMesh mesh = generated_mesh(a.spec);
  if (a.out.empty()) {
    write_obj(precise(std::cout), mesh);
  } else {
    save_obj(a.out, mesh);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-method geodesic distance toolkit"};
  app.require_subcommand(1);

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "Distance field from source vertices");
  add_mesh_options(c, compute.mesh);
  c->add_option("--source", compute.sources, "Source vertices: comma list or @file of indices");
  c->add_option("--nearest", compute.nearest, "Add the vertex nearest to x,y,z as a source");
  c->add_option("--m", compute.m, "Time multiplier, t = m h^2")->check(CLI::PositiveNumber);
  c->add_option("--bc", compute.bc, "Boundary condition: neumann, dirichlet, averaged");
  c->add_option("--out", compute.out, "Output path (stdout if omitted)");
  c->add_option("--format", compute.format, "csv or ply_scalar");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Build time versus per-query solve time");
  add_mesh_options(b, bench.mesh);
  b->add_option("--queries,-k", bench.queries, "Number of random single-source queries");
  b->add_option("--m", bench.m, "Time multiplier")->check(CLI::PositiveNumber);
  b->add_option("--seed", bench.seed, "Source selection seed");
  b->add_option("--threads", bench.threads, "Concurrent queries")->check(CLI::PositiveNumber);
  b->add_option("--out", bench.out, "Output path");

  ConvergenceArgs conv;
  auto* v = app.add_subcommand("convergence", "Error against analytic distance under refinement");
  v->add_option("--family", conv.family, "icosphere or grid");
  v->add_option("--levels", conv.levels, "Refinement levels")->delimiter(',');
  v->add_option("--m", conv.m, "Time multiplier")->check(CLI::PositiveNumber);
  v->add_option("--threads", conv.threads, "Levels computed concurrently")->check(CLI::PositiveNumber);
  v->add_option("--out", conv.out, "Output path");

  VaradhanArgs var;
  auto* r = app.add_subcommand("varadhan", "Exact small-t heat exponents on a grid graph");
  r->add_option("--grid", var.grid, "Grid side length (at most 10)");
  r->add_option("--t-exponents", var.exponents, "t = 10^-k for each k")->delimiter(',');
  r->add_option("--source", var.source, "Source vertex (default: centre)");
  r->add_flag("--laplacian", var.laplacian, "Use the graph Laplacian instead of the adjacency matrix");
  r->add_option("--out", var.out, "Output path");

  MetricArgs metric;
  auto* mt = app.add_subcommand("metric", "Symmetry and triangle-inequality violations");
  mt->add_option("--family", metric.family, "icosphere or grid");
  mt->add_option("--level", metric.level, "Refinement level");
  mt->add_option("--m", metric.m, "Time multipliers (default 1)")->delimiter(',');
  mt->add_option("--sources", metric.sources, "Number of random source vertices");
  mt->add_option("--pairs", metric.pairs, "Sampled pairs");
  mt->add_option("--triples", metric.triples, "Sampled triples");
  mt->add_option("--seed", metric.seed, "Sampling seed");
  mt->add_option("--out", metric.out, "Output path");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a generated mesh as OBJ");
  g->add_option("spec", gen.spec, "icosphere:K, grid:N[:spacing], perturbed-grid:N:noise[:seed], torus:R:r:nu:nv")->required();
  g->add_option("--out", gen.out, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c->parsed()) return run_compute(compute);
    if (b->parsed()) return run_bench(bench);
    if (v->parsed()) return run_convergence(conv);
    if (r->parsed()) return run_varadhan(var);
    if (mt->parsed()) return run_metric(metric);
    if (g->parsed()) return run_generate(gen);
  } catch (const FactorizationError& e) {
    std::cerr << "heatgeo: numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const SingularSystemError& e) {
    std::cerr << "heatgeo: numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "heatgeo: numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // parse, validation, range and I/O problems
    std::cerr << "heatgeo: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
